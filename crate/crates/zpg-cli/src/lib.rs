//! Library side of the `zpg` binary: grid parsing, the verify suite and the
//! subcommand bodies, each returning its output and exit code.

pub mod grid;
pub mod suite;

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use zpg::classifier::{
    case7_concrete, classify, concrete_invariants, descriptor_precisions, measure_classification, ClassifyError,
    ExtensionDescriptor,
};
use zpg::identities::Fault;
use zpg::invariants::{default_precision, measure_report, InvariantReport};
use zpg::presentation::Presentation;

use crate::grid::{descriptor_key, GridSpec};
use crate::suite::{run_suite, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Environment variable overriding the default K1.
pub const PRECISION_ENV: &str = "ZPG_PRECISION";

pub const COMPARE_CAVEAT: &str =
    "note: invariant reports are not complete isomorphism invariants; equal reports do not prove isomorphic modules";

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn input_error(msg: impl Into<String>) -> Self {
        Outcome { stdout: String::new(), stderr: msg.into(), code: EXIT_INPUT }
    }
}

/// `--precision` wins over ZPG_PRECISION; None leaves the per-object default.
pub fn resolve_precision(flag: Option<u32>, env: Option<&str>) -> Result<Option<u32>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        None => Ok(None),
        Some(s) => s.parse::<u32>().map(Some).map_err(|_| format!("{PRECISION_ENV} must be a positive integer, got `{s}`")),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("malformed JSON in {}: {e}", path.display()))
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

pub fn classify_descriptor(desc: &ExtensionDescriptor, precision: Option<u32>) -> Outcome {
    let c = match classify(desc) {
        Ok(c) => c,
        Err(e @ ClassifyError::Invalid(_)) => return Outcome::input_error(e.to_string()),
        Err(e) => return Outcome { code: EXIT_MISMATCH, stderr: e.to_string(), ..Default::default() },
    };
    let (k1, k2) = precision.map(|k| (k, k + 2)).unwrap_or_else(|| descriptor_precisions(desc));
    let measured = measure_classification(&c, k1, k2);
    let mut ok = matches!(&measured, Ok(r) if r.same_invariants(&c.expected));
    let mut record = json!({
        "case": c.case,
        "descriptor": c.descriptor,
        "derived": c.derived,
        "presentation": c.presentation,
        "relations": c.presentation.describe(),
        "expected": c.expected,
        "splitting": c.splitting,
    });
    match &measured {
        Ok(r) => {
            record["measured"] = json!(r);
            record["diff"] = json!(r.diff(&c.expected));
        }
        Err(e) => record["measured_error"] = json!(e.to_string()),
    }
    if !desc.residual_char_is_p {
        match case7_concrete(desc).map(|m| (concrete_invariants(&m, k1), m)) {
            Ok((Ok(rep), model)) => {
                let agrees = matches!(&measured, Ok(r) if r.same_invariants(&rep));
                let periodic = model.action_has_order_dividing_pn();
                ok &= agrees && periodic;
                record["concrete"] = json!({
                    "model": model,
                    "report": rep,
                    "matches_presentation": agrees,
                    "action_order": model.action_order(),
                });
            }
            Ok((Err(e), _)) | Err(ClassifyError::Invariant(e)) => {
                ok = false;
                record["concrete"] = json!({ "error": e.to_string() });
            }
            Err(e) => {
                ok = false;
                record["concrete"] = json!({ "error": e.to_string() });
            }
        }
    }
    record["match"] = json!(ok);
    Outcome {
        stdout: pretty(&record),
        stderr: if ok { String::new() } else { format!("mismatch for {}", c.case) },
        code: if ok { EXIT_OK } else { EXIT_MISMATCH },
    }
}

pub fn cmd_classify(desc_path: &Path, precision: Option<u32>) -> Outcome {
    match read_json::<ExtensionDescriptor>(desc_path) {
        Ok(d) => classify_descriptor(&d, precision),
        Err(e) => Outcome::input_error(e),
    }
}

pub fn cmd_invariants(pres_path: &Path, precision: Option<u32>) -> Outcome {
    let pres: Presentation = match read_json(pres_path) {
        Ok(p) => p,
        Err(e) => return Outcome::input_error(e),
    };
    let k1 = precision.unwrap_or_else(|| default_precision(&pres));
    match measure_report(&pres, k1, k1 + 2, None) {
        Ok(r) => Outcome { stdout: pretty(&r), ..Default::default() },
        Err(e) => Outcome { code: EXIT_MISMATCH, stderr: e.to_string(), ..Default::default() },
    }
}

pub fn parse_fault(s: &str) -> Result<Fault, String> {
    match s {
        "sm-inclusive" => Ok(Fault::SmInclusive),
        _ => Err(format!("unknown fault `{s}`")),
    }
}

pub fn cmd_verify(only: Option<&str>, grid: Option<&str>, fault: Option<&str>, precision: Option<u32>) -> Outcome {
    if let Some(o) = only {
        if !suite::CHECK_NAMES.contains(&o) {
            return Outcome::input_error(format!("unknown check `{o}`; known: {}", suite::CHECK_NAMES.join(", ")));
        }
    }
    let spec = match grid.map(GridSpec::parse).transpose() {
        Ok(g) => g,
        Err(e) => return Outcome::input_error(e.to_string()),
    };
    let fault = match fault.map(parse_fault).transpose() {
        Ok(f) => f,
        Err(e) => return Outcome::input_error(e),
    };
    let opts = SuiteOptions {
        spot_checks: spec.is_none(),
        grid: spec.unwrap_or_default(),
        only: only.map(String::from),
        fault,
        precision,
    };
    let records = run_suite(&opts);
    let mut stdout = String::new();
    for r in &records {
        stdout.push_str(&serde_json::to_string(r).expect("serializable"));
        stdout.push('\n');
    }
    let passed = records.iter().filter(|r| r.pass).count();
    let mut stderr = format!("{passed}/{} checks passed", records.len());
    let code = match records.iter().find(|r| !r.pass) {
        None => EXIT_OK,
        Some(r) => {
            stderr.push_str(&format!("; first failure: {} {}", r.name, serde_json::to_string(&r.params).unwrap_or_default()));
            EXIT_MISMATCH
        }
    };
    Outcome { stdout, stderr, code }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub p: u64,
    pub n: u32,
    pub d: u32,
    pub a: u32,
    pub b: u32,
    pub m: u32,
    pub kappa: i64,
    pub residual: &'static str,
    pub procyclic: bool,
    pub l: Option<u32>,
    pub minus_one_is_norm: Option<bool>,
    pub case: String,
    /// exponents of the torsion divisors, `;`-separated
    pub torsion: String,
    pub h0: String,
    pub h1: String,
    pub character: String,
    pub splitting: bool,
    #[serde(rename = "match")]
    pub matches: bool,
    pub error: Option<String>,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

pub fn sweep_row(desc: &ExtensionDescriptor, precision: Option<u32>) -> SweepRow {
    let mut row = SweepRow {
        p: desc.p,
        n: desc.n,
        d: desc.d,
        a: desc.a,
        b: desc.b,
        m: desc.m,
        kappa: desc.kappa,
        residual: if desc.residual_char_is_p { "p" } else { "other" },
        procyclic: desc.procyclic,
        l: desc.l,
        minus_one_is_norm: desc.minus_one_is_norm,
        case: String::new(),
        torsion: String::new(),
        h0: String::new(),
        h1: String::new(),
        character: String::new(),
        splitting: desc.b == 0,
        matches: false,
        error: None,
    };
    let c = match classify(desc) {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.case = c.case.to_string();
    let (k1, k2) = precision.map(|k| (k, k + 2)).unwrap_or_else(|| descriptor_precisions(desc));
    match measure_classification(&c, k1, k2) {
        Ok(r) => {
            row.torsion = join(&r.torsion_divisors);
            row.h0 = r.h0_order.to_string();
            row.h1 = r.h1_order.to_string();
            row.character = join(&r.character);
            row.matches = r.same_invariants(&c.expected);
            if !row.matches {
                row.error = Some(format!("expected/measured: {}", r.diff(&c.expected).join(", ")));
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

pub fn sweep_rows(spec: &GridSpec, precision: Option<u32>) -> Vec<SweepRow> {
    let descs = spec.descriptors();
    let mut rows: Vec<(_, SweepRow)> =
        descs.par_iter().map(|d| (descriptor_key(d), sweep_row(d, precision))).collect();
    rows.sort_by(|x, y| x.0.cmp(&y.0));
    rows.into_iter().map(|(_, r)| r).collect()
}

pub fn write_rows(rows: &[SweepRow], out: &Path) -> Result<(), String> {
    let csv_out = out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let bytes = if csv_out {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| e.to_string())?;
        }
        w.into_inner().map_err(|e| e.to_string())?
    } else {
        pretty(&rows).into_bytes()
    };
    std::fs::write(out, bytes).map_err(|e| format!("cannot write {}: {e}", out.display()))
}

pub fn cmd_sweep(grid: &str, out: &Path, precision: Option<u32>) -> Outcome {
    let spec = match GridSpec::parse(grid) {
        Ok(g) => g,
        Err(e) => return Outcome::input_error(e.to_string()),
    };
    let rows = sweep_rows(&spec, precision);
    if let Err(e) = write_rows(&rows, out) {
        return Outcome::input_error(e);
    }
    let bad: Vec<&SweepRow> = rows.iter().filter(|r| !r.matches).collect();
    let summary = json!({ "rows": rows.len(), "mismatches": bad.len(), "out": out.display().to_string() });
    Outcome {
        stdout: pretty(&summary),
        stderr: bad.iter().map(|r| format!("flagged: {r:?}\n")).collect(),
        code: if bad.is_empty() { EXIT_OK } else { EXIT_MISMATCH },
    }
}

pub fn compare_reports(a: &InvariantReport, b: &InvariantReport) -> Outcome {
    let diff = a.diff(b);
    let identical = diff.is_empty();
    Outcome {
        stdout: pretty(&json!({ "identical": identical, "diff": diff })),
        stderr: COMPARE_CAVEAT.to_string(),
        code: if identical { EXIT_OK } else { EXIT_MISMATCH },
    }
}

pub fn cmd_compare(a: &Path, b: &Path) -> Outcome {
    match (read_json::<InvariantReport>(a), read_json::<InvariantReport>(b)) {
        (Ok(x), Ok(y)) => compare_reports(&x, &y),
        (Err(e), _) | (_, Err(e)) => Outcome::input_error(e),
    }
}
