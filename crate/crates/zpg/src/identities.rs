//! Group ring identities used in the norm computations, checked exactly or as
//! relation-membership facts with explicit witnesses.

use serde::{Deserialize, Serialize};

use crate::group_ring::{GroupRingElem, RingContext, Special};
use crate::invariants::PPower;
use crate::presentation::{pres_make, rel_membership_witness, ElementExpr, Presentation, Witness};
use crate::spaces::{
    default_precisions, identity_precision, make_case_presentation, make_w, measure_case,
    torsion_generator_xi, CaseId, FormalSpaceParams, SpaceError,
};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    pub p: u64,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub params: CheckParams,
    pub pass: bool,
    /// one witness per membership fact, in the order the facts are listed
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    pub detail: String,
}

impl IdentityCheck {
    fn exact(name: &str, params: CheckParams, pass: bool, detail: String) -> Self {
        IdentityCheck {
            name: name.into(),
            params,
            pass,
            witnesses: Vec::new(),
            detail,
        }
    }

    fn error(name: &str, params: CheckParams, e: impl std::fmt::Display) -> Self {
        Self::exact(name, params, false, format!("error: {e}"))
    }
}

fn base(ctx: RingContext) -> CheckParams {
    CheckParams {
        p: ctx.p(),
        n: ctx.n(),
        ..Default::default()
    }
}

/// A(1 - σ) = N - p^n.
pub fn check_abel(ctx: RingContext) -> IdentityCheck {
    let params = base(ctx);
    let run = || -> Result<bool, crate::group_ring::RingError> {
        let ctx = ctx.as_exact();
        let a = GroupRingElem::special(ctx, Special::Abel)?;
        let n = GroupRingElem::special(ctx, Special::Norm)?;
        let one_minus = GroupRingElem::from_terms(ctx, &[(0, 1), (1, -1)])?;
        let pn = (ctx.p() as i128).pow(ctx.n());
        Ok(a.mul(&one_minus)? == n.sub(&GroupRingElem::constant(ctx, pn))?)
    };
    match run() {
        Ok(pass) => IdentityCheck::exact("abel", params, pass, "A(1-σ) = N - p^n".into()),
        Err(e) => IdentityCheck::error("abel", params, e),
    }
}

/// Deliberate corruptions for negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// S_m summed up to σ^{p^m} inclusive
    SmInclusive,
}

/// 1 - σ^{p^m} = (1 - σ)S_m and A_m(1 - σ^{p^m}) = N_m - p^{n-m}.
pub fn check_tower(ctx: RingContext, m: u32) -> IdentityCheck {
    tower(ctx, m, None)
}

pub fn check_tower_with_fault(ctx: RingContext, m: u32, fault: Fault) -> IdentityCheck {
    tower(ctx, m, Some(fault))
}

fn tower(ctx: RingContext, m: u32, fault: Option<Fault>) -> IdentityCheck {
    let mut params = base(ctx);
    params.m = Some(m);
    let run = || -> Result<(bool, bool), crate::group_ring::RingError> {
        let ctx = ctx.as_exact();
        let sm = match fault {
            None => GroupRingElem::special(ctx, Special::S(m))?,
            Some(Fault::SmInclusive) => {
                let terms: Vec<(i64, i128)> = (0..=ctx.p().pow(m) as i64).map(|k| (k, 1)).collect();
                GroupRingElem::from_terms(ctx, &terms)?
            }
        };
        let am = GroupRingElem::special(ctx, Special::Am(m))?;
        let nm = GroupRingElem::special(ctx, Special::Nm(m))?;
        let one_minus = GroupRingElem::from_terms(ctx, &[(0, 1), (1, -1)])?;
        let one_minus_pm = GroupRingElem::from_terms(ctx, &[(0, 1), (ctx.p().pow(m) as i64, -1)])?;
        let first = one_minus.mul(&sm)? == one_minus_pm;
        let pnm = (ctx.p() as i128).pow(ctx.n() - m);
        let second = am.mul(&one_minus_pm)? == nm.sub(&GroupRingElem::constant(ctx, pnm))?;
        Ok((first, second))
    };
    match run() {
        Ok((first, second)) => IdentityCheck::exact(
            "tower",
            params,
            first && second,
            format!("(1-σ)S_m = 1-σ^(p^m): {first}; A_m(1-σ^(p^m)) = N_m - p^(n-m): {second}"),
        ),
        Err(e) => IdentityCheck::error("tower", params, e),
    }
}

/// Decides each target by membership at precision K and checks the witness
/// by re-multiplication.
fn membership_facts(
    name: &str,
    params: CheckParams,
    pres: &Presentation,
    targets: &[(&str, ElementExpr)],
    k: u32,
) -> IdentityCheck {
    let mut witnesses = Vec::new();
    let mut notes = Vec::new();
    let mut pass = true;
    for (label, target) in targets {
        match rel_membership_witness(pres, target, k) {
            Ok(Some(w)) => {
                let sound = w.verify(pres, target);
                pass &= sound;
                notes.push(format!("{label}: member, witness sound: {sound}"));
                witnesses.push(w);
            }
            Ok(None) => {
                pass = false;
                let residual: Vec<String> = target.exponents.iter().map(|e| e.to_text()).collect();
                notes.push(format!(
                    "{label}: not a member, residual [{}]",
                    residual.join(", ")
                ));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{label}: error {e}"));
            }
        }
    }
    IdentityCheck {
        name: name.into(),
        params,
        pass,
        witnesses,
        detail: notes.join("; "),
    }
}

fn pw(p: u64, e: u32) -> i128 {
    (p as i128).pow(e)
}

fn lemma_params(p: u64, n: u32, a: u32) -> CheckParams {
    CheckParams {
        p,
        n,
        a: Some(a),
        c: Some(n.min(a)),
        ..Default::default()
    }
}

/// In ⟨Z, Y⟩/(Z^{p^a} Y^{σ-1}) with c = min(n, a) and r = Z^{p^{a-c}A} Y^{p^{n-c}}:
/// r^{1-σ} = Z^{p^{a-c}N} and Y^N = Z^{p^a A} Y^{p^n}.
pub fn check_lemma_321(p: u64, n: u32, a: u32) -> IdentityCheck {
    let params = lemma_params(p, n, a);
    let run = || -> Result<IdentityCheck, SpaceError> {
        let ctx = RingContext::exact(p, n)?;
        let c = n.min(a);
        let gre = |t: &[(i64, i128)]| GroupRingElem::from_terms(ctx, t);
        let abel = GroupRingElem::special(ctx, Special::Abel)?;
        let norm = GroupRingElem::special(ctx, Special::Norm)?;
        let one_minus = gre(&[(0, 1), (1, -1)])?;
        let pres = pres_make(
            ctx,
            vec!["Z".into(), "Y".into()],
            vec![vec![
                GroupRingElem::constant(ctx, pw(p, a)),
                gre(&[(1, 1), (0, -1)])?,
            ]],
            vec![],
        )?;
        let z = ElementExpr::generator(&pres, 0);
        let y = ElementExpr::generator(&pres, 1);
        let r = z
            .pow(&abel.scale(pw(p, a - c))?)?
            .combine(&y.pow_int(pw(p, n - c))?)?;
        let t1 = r
            .pow(&one_minus)?
            .combine(&z.pow(&norm.scale(pw(p, a - c))?)?.inverse()?)?;
        let t2 = y.pow(&norm)?.combine(
            &z.pow(&abel.scale(pw(p, a))?)?
                .combine(&y.pow_int(pw(p, n))?)?
                .inverse()?,
        )?;
        let k = a + n + 6;
        Ok(membership_facts(
            "lemma_321",
            params.clone(),
            &pres,
            &[
                ("r^(1-σ) = Z^(p^(a-c)N)", t1),
                ("Y^N = Z^(p^a A) Y^(p^n)", t2),
            ],
            k,
        ))
    };
    run().unwrap_or_else(|e| IdentityCheck::error("lemma_321", lemma_params(p, n, a), e))
}

/// In ⟨X0, Z, Y⟩ with rows Z^{p^a} X0^{-1} Y^{σ-1} and X0^{1-σ}:
/// r^{1-σ} = Z^{p^{a-c}N} X0^{-p^{n-c}} and Y^N = r^{p^c} X0^{-p^n(p^n-1)/2}.
pub fn check_lemma_357(p: u64, n: u32, a: u32) -> IdentityCheck {
    let params = lemma_params(p, n, a);
    let run = || -> Result<IdentityCheck, SpaceError> {
        let ctx = RingContext::exact(p, n)?;
        let c = n.min(a);
        let gre = |t: &[(i64, i128)]| GroupRingElem::from_terms(ctx, t);
        let abel = GroupRingElem::special(ctx, Special::Abel)?;
        let norm = GroupRingElem::special(ctx, Special::Norm)?;
        let one_minus = gre(&[(0, 1), (1, -1)])?;
        let pres = pres_make(
            ctx,
            vec!["X0".into(), "Z".into(), "Y".into()],
            vec![vec![
                GroupRingElem::constant(ctx, -1),
                GroupRingElem::constant(ctx, pw(p, a)),
                gre(&[(1, 1), (0, -1)])?,
            ]],
            vec![0],
        )?;
        let x0 = ElementExpr::generator(&pres, 0);
        let z = ElementExpr::generator(&pres, 1);
        let y = ElementExpr::generator(&pres, 2);
        let r = z
            .pow(&abel.scale(pw(p, a - c))?)?
            .combine(&y.pow_int(pw(p, n - c))?)?;
        let rhs1 = z
            .pow(&norm.scale(pw(p, a - c))?)?
            .combine(&x0.pow_int(-pw(p, n - c))?)?;
        let t1 = r.pow(&one_minus)?.combine(&rhs1.inverse()?)?;
        let pn = pw(p, n);
        let rhs2 = r
            .pow_int(pw(p, c))?
            .combine(&x0.pow_int(-(pn * (pn - 1) / 2))?)?;
        let t2 = y.pow(&norm)?.combine(&rhs2.inverse()?)?;
        let k = a + n + 6;
        Ok(membership_facts(
            "lemma_357",
            params.clone(),
            &pres,
            &[
                ("r^(1-σ) = Z^(p^(a-c)N) X0^(-p^(n-c))", t1),
                ("Y^N = r^(p^c) X0^(-p^n(p^n-1)/2)", t2),
            ],
            k,
        ))
    };
    run().unwrap_or_else(|e| IdentityCheck::error("lemma_357", lemma_params(p, n, a), e))
}

fn w_params(params: &FormalSpaceParams) -> CheckParams {
    CheckParams {
        p: params.p,
        n: params.n,
        a: Some(params.a),
        b: Some(params.b),
        m: Some(params.m),
        c: Some((params.n - params.m.min(params.n)).min(params.a)),
        kappa: Some(params.kappa),
        l: params.l,
        variant: None,
    }
}

/// In W_{a,b,m,n} with c = min(n-m, a) and
/// r = S^{κ S_m A_m p^{a-c}} (T^{S_m} S^{-1})^{p^{n-m-c}}: r^{1-σ} Ξ^{-κp^{a-c}}
/// is a relation member.
pub fn check_case5_radical(params: &FormalSpaceParams) -> IdentityCheck {
    let cp = w_params(params);
    if params.m < 1 || params.n <= params.m {
        return IdentityCheck::error("case5_radical", cp, "requires m ≥ 1 and n > m");
    }
    let run = || -> Result<IdentityCheck, SpaceError> {
        let w = make_w(params)?;
        let ctx = w.ctx();
        let (p, n, a, m) = (params.p, params.n, params.a, params.m);
        let c = (n - m).min(a);
        let kappa = params.kappa as i128;
        let sm = GroupRingElem::special(ctx, Special::S(m))?;
        let am = GroupRingElem::special(ctx, Special::Am(m))?;
        let one_minus = GroupRingElem::from_terms(ctx, &[(0, 1), (1, -1)])?;
        let s = ElementExpr::generator(&w, 1);
        let t = ElementExpr::generator(&w, 2);
        let first = s.pow(&sm.mul(&am)?.scale(kappa * pw(p, a - c))?)?;
        let second = t
            .pow(&sm)?
            .combine(&s.inverse()?)?
            .pow_int(pw(p, n - m - c))?;
        let r = first.combine(&second)?;
        let xi = torsion_generator_xi(params)?;
        let target = r
            .pow(&one_minus)?
            .combine(&xi.pow_int(-kappa * pw(p, a - c))?)?;
        Ok(membership_facts(
            "case5_radical",
            cp.clone(),
            &w,
            &[("r^(1-σ) = Ξ^(κp^(a-c))", target)],
            identity_precision(params),
        ))
    };
    run().unwrap_or_else(|e| IdentityCheck::error("case5_radical", w_params(params), e))
}

/// The two spaces of the n ≥ 2, p = 2 special case have torsion of order
/// 2^l, |H^0| = 2^n and |H^1| = 1.
pub fn check_case6_relations(l: u32, n: u32, minus_one_is_norm: bool) -> IdentityCheck {
    let case = if minus_one_is_norm {
        CaseId::Case6_norm
    } else {
        CaseId::Case6_nonorm
    };
    let cp = CheckParams {
        p: 2,
        n,
        a: Some(1),
        m: Some(1),
        l: Some(l),
        variant: Some(case.name().into()),
        ..Default::default()
    };
    let params = FormalSpaceParams::new(2, n, 1, 0, 1, -1).with_l(l);
    let run = || -> Result<IdentityCheck, SpaceError> {
        make_case_presentation(case, &params)?;
        let (k1, k2) = default_precisions(&params);
        let rep = measure_case(case, &params, k1, k2)?;
        let torsion_ok =
            rep.torsion_divisors == vec![l] && rep.torsion_gen_order == Some(PPower::new(2, l));
        let coh_ok = rep.h0_order == PPower::new(2, n) && rep.h1_order == PPower::new(2, 0);
        Ok(IdentityCheck::exact(
            "case6_relations",
            cp.clone(),
            torsion_ok && coh_ok,
            format!(
                "torsion {:?} (Ξ order {:?}), h0 {}, h1 {}",
                rep.torsion_divisors,
                rep.torsion_gen_order.map(|x| x.to_string()),
                rep.h0_order,
                rep.h1_order
            ),
        ))
    };
    run().unwrap_or_else(|e| IdentityCheck::error("case6_relations", cp.clone(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abel_small() {
        for (p, n) in [(2, 1), (3, 1), (2, 3)] {
            assert!(check_abel(RingContext::exact(p, n).unwrap()).pass);
        }
    }

    #[test]
    fn tower_and_fault() {
        let ctx = RingContext::exact(2, 2).unwrap();
        for m in 0..=2 {
            assert!(check_tower(ctx, m).pass, "m = {m}");
        }
        assert!(!check_tower_with_fault(ctx, 1, Fault::SmInclusive).pass);
    }

    #[test]
    fn lemmas_spot() {
        assert!(check_lemma_321(2, 1, 1).pass);
        assert!(check_lemma_321(2, 1, 2).pass);
        assert!(check_lemma_357(3, 1, 1).pass);
        let c = check_lemma_357(2, 2, 1);
        assert!(c.pass, "{}", c.detail);
        assert_eq!(c.witnesses.len(), 2);
    }

    #[test]
    fn radical_spot() {
        let c = check_case5_radical(&FormalSpaceParams::new(3, 2, 1, 0, 1, 1));
        assert!(c.pass, "{}", c.detail);
        assert!(!check_case5_radical(&FormalSpaceParams::new(3, 2, 1, 0, 0, 1)).pass);
    }
}
