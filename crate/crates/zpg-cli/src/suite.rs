//! The `verify` suite: identity checks plus invariant assertions over a grid.

use rayon::prelude::*;
use zpg::group_ring::RingContext;
use zpg::identities::{
    check_abel, check_case5_radical, check_case6_relations, check_lemma_321, check_lemma_357, check_tower,
    check_tower_with_fault, CheckParams, Fault, IdentityCheck,
};
use zpg::presentation::{rel_membership_witness, Witness};
use zpg::spaces::{
    default_precisions, identity_precision, make_w, measure_case, measure_w, p_entry, r_entry, torsion_generator_xi,
    expected_invariants, CaseId, FormalSpaceParams,
};

use crate::grid::GridSpec;

pub const CHECK_NAMES: [&str; 8] = [
    "abel",
    "tower",
    "lemma_321",
    "lemma_357",
    "case5_radical",
    "case6_relations",
    "w_invariants",
    "special_spaces",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Item {
    Abel(u64, u32),
    Tower(u64, u32, u32),
    L321(u64, u32, u32),
    L357(u64, u32, u32),
    Radical(FormalSpaceParams),
    Case6(u32, u32, bool),
    W(FormalSpaceParams),
    Special(CaseId, u32, u32),
}

impl Item {
    fn name(&self) -> &'static str {
        match self {
            Item::Abel(..) => "abel",
            Item::Tower(..) => "tower",
            Item::L321(..) => "lemma_321",
            Item::L357(..) => "lemma_357",
            Item::Radical(..) => "case5_radical",
            Item::Case6(..) => "case6_relations",
            Item::W(..) => "w_invariants",
            Item::Special(..) => "special_spaces",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub grid: GridSpec,
    pub only: Option<String>,
    pub fault: Option<Fault>,
    /// K1 override for the invariant assertions; K2 = K1 + 2
    pub precision: Option<u32>,
    /// adds p = 5, n = 1
    pub spot_checks: bool,
}

fn items(opts: &SuiteOptions) -> Vec<Item> {
    let mut pn: Vec<(u64, u32)> = Vec::new();
    for &p in &opts.grid.p {
        for &n in &opts.grid.n {
            pn.push((p, n));
        }
    }
    let mut w = opts.grid.formal_params();
    if opts.spot_checks && !pn.contains(&(5, 1)) {
        pn.push((5, 1));
        let mut spot = opts.grid.clone();
        spot.p = vec![5];
        spot.n = vec![1];
        w.extend(spot.formal_params());
    }
    let lemma_a: Vec<u32> = opts.grid.a.iter().copied().filter(|&a| a >= 1).collect();
    let mut out = Vec::new();
    for &(p, n) in &pn {
        out.push(Item::Abel(p, n));
        out.extend((0..=n).map(|m| Item::Tower(p, n, m)));
        for &a in &lemma_a {
            out.push(Item::L321(p, n, a));
            out.push(Item::L357(p, n, a));
        }
    }
    out.extend(w.iter().filter(|q| q.m >= 1 && q.n > q.m).cloned().map(Item::Radical));
    for &n in opts.grid.n.iter().filter(|_| opts.grid.p.contains(&2)) {
        for &l in &opts.grid.l {
            if n >= 2 {
                out.push(Item::Case6(l, n, true));
                out.push(Item::Case6(l, n, false));
            }
            let cases = if n == 1 {
                [CaseId::Case3_3a, CaseId::Case3_3b]
            } else {
                [CaseId::Case6_norm, CaseId::Case6_nonorm]
            };
            out.extend(cases.into_iter().map(|case| Item::Special(case, l, n)));
        }
    }
    out.extend(w.into_iter().map(Item::W));
    if let Some(only) = &opts.only {
        out.retain(|it| it.name() == only);
    }
    out
}

fn w_params(q: &FormalSpaceParams) -> CheckParams {
    CheckParams {
        p: q.p,
        n: q.n,
        a: Some(q.a),
        b: Some(q.b),
        m: Some(q.m),
        kappa: Some(q.kappa),
        l: q.l,
        ..Default::default()
    }
}

fn record(name: &str, params: CheckParams, pass: bool, witnesses: Vec<Witness>, detail: String) -> IdentityCheck {
    IdentityCheck { name: name.into(), params, pass, witnesses, detail }
}

fn precisions(q: &FormalSpaceParams, over: Option<u32>) -> (u32, u32) {
    match over {
        Some(k) => (k, k + 2),
        None => default_precisions(q),
    }
}

/// Measured report of W equals the closed form, and Ξ^P, Ξ^R are relation
/// members with verified witnesses.
pub fn w_invariant_check(q: &FormalSpaceParams, precision: Option<u32>) -> IdentityCheck {
    let cp = w_params(q);
    let run = || -> Result<IdentityCheck, String> {
        let (k1, k2) = precisions(q, precision);
        let rep = measure_w(q, k1, k2).map_err(|e| e.to_string())?;
        let exp = expected_invariants(CaseId::Case5, q);
        let diff = rep.diff(&exp);
        let w = make_w(q).map_err(|e| e.to_string())?;
        let xi = torsion_generator_xi(q).map_err(|e| e.to_string())?;
        let mut witnesses = Vec::new();
        let mut members = true;
        for e in [p_entry(q), r_entry(q)] {
            let e = e.map_err(|e| e.to_string())?;
            let v = xi.pow(&e).map_err(|e| e.to_string())?;
            match rel_membership_witness(&w, &v, identity_precision(q)).map_err(|e| e.to_string())? {
                Some(wit) if wit.verify(&w, &v) => witnesses.push(wit),
                _ => members = false,
            }
        }
        let detail = if diff.is_empty() && members {
            format!("report matches; Ξ^P, Ξ^R members at K = {}", identity_precision(q))
        } else {
            format!("diff {diff:?}; memberships {members}")
        };
        Ok(record("w_invariants", cp.clone(), diff.is_empty() && members, witnesses, detail))
    };
    run().unwrap_or_else(|e| record("w_invariants", cp.clone(), false, Vec::new(), format!("error: {e}")))
}

pub fn special_space_check(case: CaseId, l: u32, n: u32, precision: Option<u32>) -> IdentityCheck {
    let q = FormalSpaceParams::new(2, n, 1, 0, 1, -1).with_l(l);
    let mut cp = w_params(&q);
    cp.variant = Some(case.name().into());
    let (k1, k2) = precisions(&q, precision);
    match measure_case(case, &q, k1, k2) {
        Ok(rep) => {
            let exp = expected_invariants(case, &q);
            let diff = rep.diff(&exp);
            let detail = format!("torsion {:?}, h0 {}, h1 {}", rep.torsion_divisors, rep.h0_order, rep.h1_order);
            record("special_spaces", cp, diff.is_empty(), Vec::new(), detail)
        }
        Err(e) => record("special_spaces", cp, false, Vec::new(), format!("error: {e}")),
    }
}

fn run_item(it: &Item, opts: &SuiteOptions) -> IdentityCheck {
    let ctx = |p, n| RingContext::exact(p, n).expect("grid p is prime");
    match it {
        Item::Abel(p, n) => check_abel(ctx(*p, *n)),
        Item::Tower(p, n, m) => match opts.fault {
            Some(f) => check_tower_with_fault(ctx(*p, *n), *m, f),
            None => check_tower(ctx(*p, *n), *m),
        },
        Item::L321(p, n, a) => check_lemma_321(*p, *n, *a),
        Item::L357(p, n, a) => check_lemma_357(*p, *n, *a),
        Item::Radical(q) => check_case5_radical(q),
        Item::Case6(l, n, norm) => check_case6_relations(*l, *n, *norm),
        Item::W(q) => w_invariant_check(q, opts.precision),
        Item::Special(case, l, n) => special_space_check(*case, *l, *n, opts.precision),
    }
}

/// Runs the suite in parallel; records come back in a fixed order.
pub fn run_suite(opts: &SuiteOptions) -> Vec<IdentityCheck> {
    items(opts).par_iter().map(|it| run_item(it, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_filters() {
        let opts = SuiteOptions { only: Some("abel".into()), ..Default::default() };
        let its = items(&opts);
        assert_eq!(its.len(), 4);
        assert!(its.iter().all(|i| i.name() == "abel"));
    }

    #[test]
    fn every_name_has_items() {
        let opts = SuiteOptions::default();
        let its = items(&opts);
        for name in CHECK_NAMES {
            assert!(its.iter().any(|i| i.name() == name), "{name}");
        }
    }
}
