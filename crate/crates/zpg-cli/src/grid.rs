//! Grid specifications such as `p=2|3,n=1..2,kappa=1|4` and their expansion
//! into descriptors and formal-space parameters.

use std::collections::BTreeSet;

use thiserror::Error;
use zpg::classifier::{validate_descriptor, ExtensionDescriptor};
use zpg::spaces::FormalSpaceParams;

pub const MAX_P: u64 = 5;
pub const MAX_N: u32 = 3;
pub const MAX_A_PLUS_M: u32 = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("malformed grid term `{0}`")]
    Malformed(String),
    #[error("unknown grid key `{0}`")]
    UnknownKey(String),
    #[error("grid outside desk limits: {0}")]
    Limits(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub p: Vec<u64>,
    pub n: Vec<u32>,
    pub a: Vec<u32>,
    /// None: 0..=n
    pub b: Option<Vec<u32>>,
    /// None: 0..=n
    pub m: Option<Vec<u32>>,
    pub d: Vec<u32>,
    /// None: {1, 1+p}
    pub kappa: Option<Vec<i64>>,
    pub l: Vec<u32>,
    /// true = residual characteristic p
    pub residual: Vec<bool>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            p: vec![2, 3],
            n: vec![1, 2],
            a: (0..=3).collect(),
            b: None,
            m: None,
            d: vec![1, 2],
            kappa: None,
            l: vec![2, 3],
            residual: vec![true, false],
        }
    }
}

fn values(term: &str, raw: &str) -> Result<Vec<i64>, GridError> {
    let bad = || GridError::Malformed(term.to_string());
    let mut out = BTreeSet::new();
    for part in raw.split('|') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
            let hi = hi.trim();
            let hi: i64 = hi.strip_prefix('=').unwrap_or(hi).trim().parse().map_err(|_| bad())?;
            if hi < lo {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.insert(part.parse::<i64>().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out.into_iter().collect())
}

fn unsigned<T: TryFrom<i64>>(term: &str, v: Vec<i64>) -> Result<Vec<T>, GridError> {
    v.into_iter().map(|x| T::try_from(x).map_err(|_| GridError::Malformed(term.to_string()))).collect()
}

impl GridSpec {
    /// Parses `key=values` terms separated by commas; unspecified keys keep
    /// their defaults. Ranges are inclusive (`1..3` is 1, 2, 3).
    pub fn parse(spec: &str) -> Result<Self, GridError> {
        let mut g = GridSpec::default();
        for term in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, raw) = term.split_once('=').ok_or_else(|| GridError::Malformed(term.to_string()))?;
            let key = key.trim();
            if key == "residual" {
                let mut r = Vec::new();
                for v in raw.split('|') {
                    match v.trim() {
                        "p" => r.push(true),
                        "other" => r.push(false),
                        _ => return Err(GridError::Malformed(term.to_string())),
                    }
                }
                g.residual = r;
                continue;
            }
            let v = values(term, raw)?;
            match key {
                "p" => g.p = unsigned(term, v)?,
                "n" => g.n = unsigned(term, v)?,
                "a" => g.a = unsigned(term, v)?,
                "b" => g.b = Some(unsigned(term, v)?),
                "m" => g.m = Some(unsigned(term, v)?),
                "d" => g.d = unsigned(term, v)?,
                "kappa" | "κ" => g.kappa = Some(v),
                "l" => g.l = unsigned(term, v)?,
                _ => return Err(GridError::UnknownKey(key.to_string())),
            }
        }
        g.check_limits()?;
        Ok(g)
    }

    pub fn check_limits(&self) -> Result<(), GridError> {
        let pmax = self.p.iter().copied().max().unwrap_or(0);
        let nmax = self.n.iter().copied().max().unwrap_or(0);
        let amax = self.a.iter().copied().max().unwrap_or(0);
        let mmax = self.m.as_ref().and_then(|m| m.iter().copied().max()).unwrap_or(nmax).min(nmax);
        if pmax > MAX_P {
            return Err(GridError::Limits(format!("p ≤ {MAX_P}")));
        }
        if nmax > MAX_N {
            return Err(GridError::Limits(format!("n ≤ {MAX_N}")));
        }
        if amax + mmax > MAX_A_PLUS_M {
            return Err(GridError::Limits(format!("a+m ≤ {MAX_A_PLUS_M}")));
        }
        Ok(())
    }

    fn kappas(&self, p: u64) -> Vec<i64> {
        self.kappa.clone().unwrap_or_else(|| vec![1, 1 + p as i64])
    }

    fn bs(&self, n: u32) -> Vec<u32> {
        self.b.clone().unwrap_or_else(|| (0..=n).collect())
    }

    fn ms(&self, n: u32) -> Vec<u32> {
        self.m.clone().unwrap_or_else(|| (0..=n).collect())
    }

    /// All valid descriptors of the grid, in a fixed order.
    pub fn descriptors(&self) -> Vec<ExtensionDescriptor> {
        let mut out = Vec::new();
        for &p in &self.p {
            for &n in &self.n {
                for &a in &self.a {
                    for b in self.bs(n) {
                        for m in self.ms(n) {
                            for &d in &self.d {
                                for kappa in self.kappas(p) {
                                    for &residual in &self.residual {
                                        self.variants(p, n, a, b, m, d, kappa, residual, &mut out);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out.sort_by_key(descriptor_key);
        out.dedup();
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn variants(
        &self,
        p: u64,
        n: u32,
        a: u32,
        b: u32,
        m: u32,
        d: u32,
        kappa: i64,
        residual: bool,
        out: &mut Vec<ExtensionDescriptor>,
    ) {
        let mut base = ExtensionDescriptor::new(p, n, a, b, m, kappa);
        base.d = d;
        base.residual_char_is_p = residual;
        let mut cands = Vec::new();
        if p == 2 && a == 1 && m >= 1 {
            for procyclic in [false, true] {
                for &l in &self.l {
                    let mut c = base.clone();
                    c.procyclic = procyclic;
                    c.l = Some(l);
                    if residual && !procyclic && m == 1 && n >= 2 {
                        for norm in [false, true] {
                            let mut c = c.clone();
                            c.minus_one_is_norm = Some(norm);
                            cands.push(c);
                        }
                    } else {
                        cands.push(c);
                    }
                }
            }
        } else {
            cands.push(base);
        }
        out.extend(cands.into_iter().filter(|c| validate_descriptor(c).is_ok()));
    }

    /// Valid W_{a,b,m,n} parameters of the grid (d, l and residual ignored).
    pub fn formal_params(&self) -> Vec<FormalSpaceParams> {
        let mut out = Vec::new();
        for &p in &self.p {
            for &n in &self.n {
                for &a in &self.a {
                    for b in self.bs(n) {
                        for m in self.ms(n) {
                            for kappa in self.kappas(p) {
                                let prm = FormalSpaceParams::new(p, n, a, b, m, kappa);
                                if prm.validate_w().is_ok() {
                                    out.push(prm);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub type DescriptorKey = (u64, u32, u32, u32, u32, u32, i64, bool, bool, Option<u32>, Option<bool>);

pub fn descriptor_key(d: &ExtensionDescriptor) -> DescriptorKey {
    (d.p, d.n, d.d, d.a, d.b, d.m, d.kappa, !d.residual_char_is_p, d.procyclic, d.l, d.minus_one_is_norm)
}
