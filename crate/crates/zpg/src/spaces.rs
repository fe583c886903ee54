//! The formal spaces W_{a,b,m,n}, the special spaces of the p = 2 cases, the
//! residual-characteristic-prime-to-p space, their closed-form invariants, the
//! torsion generator Ξ and the monomial rewrites between the spaces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group_ring::{valuation, GroupRingElem, RingContext, RingError, Special};
use crate::invariants::{
    measure_report, rank_from_character, InvResult, InvariantError, InvariantReport, PPower,
};
use crate::presentation::{
    pres_make, pres_substitute, ElementExpr, Presentation, PresentationError, Row, Substitution,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("invalid parameters: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("unimplemented: {0}")]
    Unimplemented(String),
    #[error("no rewrite applies: {0}")]
    NotApplicable(String),
}

pub type SpaceResult<T> = Result<T, SpaceError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalSpaceParams {
    pub p: u64,
    pub n: u32,
    pub a: u32,
    pub b: u32,
    pub m: u32,
    pub kappa: i64,
    /// |μ_{K(i)}| = 2^l; only meaningful for p = 2, a = 1
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
}

impl FormalSpaceParams {
    pub fn new(p: u64, n: u32, a: u32, b: u32, m: u32, kappa: i64) -> Self {
        FormalSpaceParams {
            p,
            n,
            a,
            b,
            m,
            kappa,
            l: None,
        }
    }

    pub fn with_l(mut self, l: u32) -> Self {
        self.l = Some(l);
        self
    }

    /// k_σ = 1 + κ p^a
    pub fn k_sigma(&self) -> i128 {
        1 + self.kappa as i128 * (self.p as i128).pow(self.a)
    }

    /// p = 2, a = 1, m ≥ 1: the torsion order is 2^{m+l-1} instead of 2^{a+m}.
    pub fn special_case_one(&self) -> bool {
        self.p == 2 && self.a == 1 && self.m >= 1
    }

    /// l implied by κ when K[μ_∞]/K is procyclic: v_2(κ+1) + 2.
    pub fn procyclic_l(&self) -> Option<u32> {
        if self.p != 2 || self.a != 1 {
            return None;
        }
        valuation(2, self.kappa as i128 + 1).map(|v| v + 2)
    }

    /// l for special case 1: the given value, else the one implied by κ.
    pub fn effective_l(&self) -> Option<u32> {
        self.l.or_else(|| self.procyclic_l())
    }

    fn ctx(&self) -> SpaceResult<RingContext> {
        Ok(RingContext::exact(self.p, self.n)?)
    }

    /// Named violations of the W_{a,b,m,n} constraints.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !crate::group_ring::is_prime(self.p) {
            out.push("p prime".to_string());
        }
        if self.n < 1 {
            out.push("n ≥ 1".to_string());
        }
        if self.b > self.a.min(self.n) {
            out.push("b ≤ min(a,n)".to_string());
        }
        if self.m + self.b > self.n {
            out.push("m+b ≤ n".to_string());
        }
        if self.p >= 2 && (self.kappa as i128).rem_euclid(self.p as i128) == 0 {
            out.push("κ unit mod p".to_string());
        }
        if self.p == 2 && self.a == 0 {
            out.push("a ≥ 1 when p = 2".to_string());
        }
        if self.a == 0 && self.m > 0 {
            out.push("m = 0 when a = 0".to_string());
        }
        if let Some(l) = self.l {
            if l < 2 {
                out.push("l ≥ 2".to_string());
            }
        }
        out
    }

    pub fn validate_w(&self) -> SpaceResult<()> {
        let mut v = self.violations();
        if self.p == 2 && self.a == 1 && self.kappa == -1 {
            v.push("κ ≠ −1".to_string());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(SpaceError::Invalid(v))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum CaseId {
    Case1,
    Case2,
    Case3_2,
    Case3_3a,
    Case3_3b,
    Case4,
    Case5,
    Case6_norm,
    Case6_nonorm,
    Case7,
}

impl CaseId {
    pub const ALL: [CaseId; 10] = [
        CaseId::Case1,
        CaseId::Case2,
        CaseId::Case3_2,
        CaseId::Case3_3a,
        CaseId::Case3_3b,
        CaseId::Case4,
        CaseId::Case5,
        CaseId::Case6_norm,
        CaseId::Case6_nonorm,
        CaseId::Case7,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseId::Case1 => "Case1",
            CaseId::Case2 => "Case2",
            CaseId::Case3_2 => "Case3_2",
            CaseId::Case3_3a => "Case3_3a",
            CaseId::Case3_3b => "Case3_3b",
            CaseId::Case4 => "Case4",
            CaseId::Case5 => "Case5",
            CaseId::Case6_norm => "Case6_norm",
            CaseId::Case6_nonorm => "Case6_nonorm",
            CaseId::Case7 => "Case7",
        }
    }

    pub fn from_name(s: &str) -> Option<CaseId> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s))
    }

    /// Cases whose space is W_{a,b,m,n} itself.
    pub fn is_w_type(&self) -> bool {
        matches!(
            self,
            CaseId::Case1 | CaseId::Case2 | CaseId::Case3_2 | CaseId::Case4 | CaseId::Case5
        )
    }

    pub fn is_special_two(&self) -> bool {
        matches!(
            self,
            CaseId::Case3_3a | CaseId::Case3_3b | CaseId::Case6_norm | CaseId::Case6_nonorm
        )
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn el(ctx: RingContext, terms: &[(i64, i128)]) -> SpaceResult<GroupRingElem> {
    Ok(GroupRingElem::from_terms(ctx, terms)?)
}

fn pw(p: u64, e: u32) -> i128 {
    (p as i128).pow(e)
}

/// P = -σ + 1 + κp^a
pub fn p_entry(params: &FormalSpaceParams) -> SpaceResult<GroupRingElem> {
    let ctx = params.ctx()?;
    el(
        ctx,
        &[
            (1, -1),
            (0, 1 + params.kappa as i128 * pw(params.p, params.a)),
        ],
    )
}

/// Q = -κp^{a-b}
pub fn q_entry(params: &FormalSpaceParams) -> SpaceResult<GroupRingElem> {
    let ctx = params.ctx()?;
    Ok(GroupRingElem::constant(
        ctx,
        -(params.kappa as i128) * pw(params.p, params.a - params.b),
    ))
}

/// R = σ^{p^m} - 1
pub fn r_entry(params: &FormalSpaceParams) -> SpaceResult<GroupRingElem> {
    let ctx = params.ctx()?;
    el(ctx, &[(params.p.pow(params.m) as i64, 1), (0, -1)])
}

fn xst(ctx: RingContext, rows: Vec<Row>) -> SpaceResult<Presentation> {
    Ok(pres_make(
        ctx,
        vec!["X".into(), "S".into(), "T".into()],
        rows,
        vec![0],
    )?)
}

/// ⟨X, S, T⟩ / (S^P X^Q T^R) with X invariant.
pub fn make_w(params: &FormalSpaceParams) -> SpaceResult<Presentation> {
    params.validate_w()?;
    let ctx = params.ctx()?;
    xst(
        ctx,
        vec![vec![q_entry(params)?, p_entry(params)?, r_entry(params)?]],
    )
}

fn require(cond: bool, what: &str, out: &mut Vec<String>) {
    if !cond {
        out.push(what.to_string());
    }
}

fn check_case(case: CaseId, params: &FormalSpaceParams) -> SpaceResult<()> {
    let mut v = Vec::new();
    if case.is_special_two() {
        require(params.p == 2, "p = 2", &mut v);
        require(params.a == 1, "a = 1", &mut v);
        require(params.m == 1, "m = 1", &mut v);
        require(params.l.is_some_and(|l| l >= 2), "l ≥ 2 given", &mut v);
        match case {
            CaseId::Case3_3a | CaseId::Case3_3b => require(params.n == 1, "n = 1", &mut v),
            _ => require(params.n >= 2, "n ≥ 2", &mut v),
        }
    }
    if case == CaseId::Case7 {
        v.extend(params.violations());
        require(params.n == params.m + params.b, "n = m+b", &mut v);
        if params.special_case_one() {
            require(params.l.is_some(), "l given", &mut v);
        }
        if params.p == 2 && params.a == 1 {
            require(params.kappa != -1, "κ ≠ −1", &mut v);
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(SpaceError::Invalid(v))
    }
}

/// The space attached to each case, X invariant throughout.
pub fn make_case_presentation(
    case: CaseId,
    params: &FormalSpaceParams,
) -> SpaceResult<Presentation> {
    if case.is_w_type() {
        return make_w(params);
    }
    check_case(case, params)?;
    let ctx = params.ctx()?;
    let zero = GroupRingElem::zero(ctx);
    let c = |x: i128| GroupRingElem::constant(ctx, x);
    let minus_one_minus_sigma = el(ctx, &[(0, -1), (1, -1)])?;
    let two_l = |e: u32| pw(2, e);
    match case {
        CaseId::Case3_3a => {
            let l = params.l.unwrap();
            xst(ctx, vec![vec![c(-1), c(two_l(l)), zero]])
        }
        CaseId::Case3_3b => {
            let l = params.l.unwrap();
            let s = el(ctx, &[(0, two_l(l - 1)), (1, -two_l(l - 1))])?;
            xst(ctx, vec![vec![zero, s, minus_one_minus_sigma]])
        }
        CaseId::Case6_norm => {
            let l = params.l.unwrap();
            xst(ctx, vec![vec![zero, c(two_l(l)), minus_one_minus_sigma]])
        }
        CaseId::Case6_nonorm => {
            let l = params.l.unwrap();
            xst(ctx, vec![vec![c(-1), c(two_l(l)), minus_one_minus_sigma]])
        }
        CaseId::Case7 => Ok(pres_make(
            ctx,
            vec!["X".into(), "S".into()],
            vec![vec![q_entry(params)?, p_entry(params)?]],
            vec![0],
        )?),
        _ => unreachable!("W-type handled above"),
    }
}

/// Exponent e with |W_tors| = p^e for each case.
pub fn expected_torsion_exponent(case: CaseId, params: &FormalSpaceParams) -> u32 {
    if case.is_special_two() {
        return params.l.unwrap_or(0);
    }
    if params.special_case_one() {
        if let Some(l) = params.effective_l() {
            return params.m + l - 1;
        }
    }
    params.a + params.m
}

/// Closed-form report: character χ_reg + 1 (χ of Z_p ⊕ μ_F for the prime-to-p
/// case), |H^0| = p^n, |H^1| = 1, cyclic torsion generated by Ξ.
pub fn expected_invariants(case: CaseId, params: &FormalSpaceParams) -> InvariantReport {
    let n = params.n as usize;
    let character = if case == CaseId::Case7 {
        let mut c = vec![0; n + 1];
        c[0] = 1;
        c
    } else {
        let mut c = vec![1; n + 1];
        c[0] = 2;
        c
    };
    let e = expected_torsion_exponent(case, params);
    let (k1, k2) = default_precisions(params);
    InvariantReport {
        zp_rank: rank_from_character(params.p, &character),
        torsion_divisors: if e == 0 { vec![] } else { vec![e] },
        h0_order: PPower::new(params.p, params.n),
        h1_order: PPower::new(params.p, 0),
        character,
        torsion_gen_order: Some(PPower::new(params.p, e)),
        stabilized_at: (k1, k2),
    }
}

/// (K1, K2) with K1 = (torsion exponent bound) + n + 4 and K2 = K1 + 2.
pub fn default_precisions(params: &FormalSpaceParams) -> (u32, u32) {
    let t = (params.a + params.m).max(params.m + params.effective_l().unwrap_or(0));
    let k1 = t + params.n + 4;
    (k1, k1 + 2)
}

/// Precision for the membership checks of the identities: a + m + n + 6.
pub fn identity_precision(params: &FormalSpaceParams) -> u32 {
    default_precisions(params).0 + 2
}

/// Exact quotient of polynomials (lowest degree first) by a divisor with
/// leading coefficient ±1; None if the remainder is nonzero.
fn poly_exact_div(num: &[i128], den: &[i128]) -> Option<Vec<i128>> {
    let mut den = den.to_vec();
    while den.last() == Some(&0) {
        den.pop();
    }
    let lead = *den.last()?;
    if lead.abs() != 1 {
        return None;
    }
    let mut r = num.to_vec();
    if r.len() < den.len() {
        return r.iter().all(|&x| x == 0).then(Vec::new);
    }
    let dd = den.len() - 1;
    let mut q = vec![0i128; r.len() - dd];
    for i in (dd..r.len()).rev() {
        let t = r[i] * lead;
        if t == 0 {
            continue;
        }
        q[i - dd] = t;
        for (j, &c) in den.iter().enumerate() {
            r[i - dd + j] -= t * c;
        }
    }
    r.iter().all(|&x| x == 0).then_some(q)
}

/// The generator of W_tors for a relation S^P X^Q T^R: with V = (X^{p^n}-1)/R,
/// Ξ = S^V when Q(1)V(1) = 0 and Ξ = S^V X^{Q(1)V(1)/P(1)} when P(1) divides
/// Q(1)V(1). `r_poly` is R as an ordinary polynomial, lowest degree first.
///
/// Returns the exponent pair (of S, of X). A quotient with a denominator prime
/// to p is cleared by raising Ξ to that unit.
pub fn torsion_generator_general(
    p_elem: &GroupRingElem,
    q_elem: &GroupRingElem,
    r_poly: &[i128],
) -> SpaceResult<(GroupRingElem, i128)> {
    let ctx = p_elem.ctx();
    let q = ctx.order();
    let mut xq = vec![0i128; q + 1];
    xq[0] = -1;
    xq[q] = 1;
    let v = poly_exact_div(&xq, r_poly).ok_or_else(|| {
        SpaceError::Unimplemented("R does not divide X^{p^n} - 1 with unit leading term".into())
    })?;
    let v_elem = GroupRingElem::new(ctx, &v)?;
    let v1: i128 = v.iter().sum();
    let q1 = q_elem.eval_one()?;
    let p1 = p_elem.eval_one()?;
    let qv = q1 * v1;
    if qv == 0 {
        return Ok((v_elem, 0));
    }
    if p1 != 0 && qv % p1 == 0 {
        return Ok((v_elem, qv / p1));
    }
    if p1 != 0 {
        let g = num_integer::gcd(qv, p1);
        let (num, den) = (qv / g, p1 / g);
        if den % ctx.p() as i128 != 0 {
            return Ok((v_elem.scale(den)?, num));
        }
    }
    Err(SpaceError::Unimplemented(
        "Q(1)V(1) divides P(1) properly: W_tors needs a second generator".into(),
    ))
}

/// Ξ = S^{N_m} X^{-p^{n-m-b}} in W_{a,b,m,n}.
pub fn torsion_generator_xi(params: &FormalSpaceParams) -> SpaceResult<ElementExpr> {
    let w = make_w(params)?;
    let mut r_poly = vec![0i128; params.p.pow(params.m) as usize + 1];
    r_poly[0] = -1;
    *r_poly.last_mut().unwrap() = 1;
    let (v, x) = torsion_generator_general(&p_entry(params)?, &q_entry(params)?, &r_poly)?;
    let ctx = params.ctx()?;
    Ok(ElementExpr::from_parts(
        &w,
        &[(0, GroupRingElem::constant(ctx, x)), (1, v)],
    )?)
}

/// Torsion generator of the space of each case.
pub fn case_torsion_generator(
    case: CaseId,
    params: &FormalSpaceParams,
) -> SpaceResult<ElementExpr> {
    let pres = make_case_presentation(case, params)?;
    let ctx = params.ctx()?;
    let expr = match case {
        c if c.is_w_type() => return torsion_generator_xi(params),
        CaseId::Case3_3a | CaseId::Case3_3b => {
            ElementExpr::from_parts(&pres, &[(1, el(ctx, &[(0, 1), (1, -1)])?)])?
        }
        CaseId::Case6_norm | CaseId::Case6_nonorm => {
            let alt: Vec<(i64, i128)> = (0..ctx.order() as i64)
                .map(|k| (k, if k % 2 == 0 { 1 } else { -1 }))
                .collect();
            ElementExpr::from_parts(&pres, &[(1, el(ctx, &alt)?)])?
        }
        _ => {
            let nm = GroupRingElem::special(ctx, Special::Nm(params.m))?;
            ElementExpr::from_parts(&pres, &[(0, GroupRingElem::constant(ctx, -1)), (1, nm)])?
        }
    };
    Ok(expr)
}

/// Measured report of a case space, Ξ included.
pub fn measure_case(
    case: CaseId,
    params: &FormalSpaceParams,
    k1: u32,
    k2: u32,
) -> SpaceResult<InvariantReport> {
    let pres = make_case_presentation(case, params)?;
    let xi = case_torsion_generator(case, params)?;
    Ok(measure_report(&pres, k1, k2, Some(&xi))?)
}

pub fn measure_w(params: &FormalSpaceParams, k1: u32, k2: u32) -> InvResult<InvariantReport> {
    let w = make_w(params).map_err(|e| InvariantError::Shape(e.to_string()))?;
    let xi = torsion_generator_xi(params).map_err(|e| InvariantError::Shape(e.to_string()))?;
    measure_report(&w, k1, k2, Some(&xi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RewriteItem {
    /// m = 0: X0 = X^κ, Z = S^κ, Y = T/S
    A,
    /// b = 0: Z = S/X
    B,
    /// m = b = 0: Z = S^κ/X^κ, Y = T/S
    C,
    /// m = n, b = 0: Z = S^κ/X^κ
    D,
    /// a = b = m = 0: as (c), leaving Z_p ⊕ Z_p[G]
    E,
}

impl RewriteItem {
    pub fn applies(&self, params: &FormalSpaceParams) -> bool {
        let FormalSpaceParams { a, b, m, n, .. } = *params;
        match self {
            RewriteItem::A => m == 0,
            RewriteItem::B => b == 0,
            RewriteItem::C => m == 0 && b == 0,
            RewriteItem::D => m == n && b == 0,
            RewriteItem::E => a == 0 && b == 0 && m == 0,
        }
    }

    /// Most specific item first.
    pub fn choose(params: &FormalSpaceParams) -> Option<RewriteItem> {
        [
            RewriteItem::E,
            RewriteItem::C,
            RewriteItem::D,
            RewriteItem::A,
            RewriteItem::B,
        ]
        .into_iter()
        .find(|it| it.applies(params))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteNotes {
    pub item: RewriteItem,
    pub new_names: Vec<String>,
    /// every non-invariance row has a zero exponent on the X generator
    pub x_free: bool,
    pub relations: Vec<String>,
}

/// Applies one rewrite item to W_{a,b,m,n}.
pub fn rewrite_with(
    item: RewriteItem,
    params: &FormalSpaceParams,
) -> SpaceResult<(Presentation, RewriteNotes)> {
    if !item.applies(params) {
        return Err(SpaceError::NotApplicable(format!("{item:?} at {params:?}")));
    }
    let w = make_w(params)?;
    let ctx = params.ctx()?;
    let k = params.kappa as i128;
    let c = |x: i128| GroupRingElem::constant(ctx, x);
    let id = Substitution::identity(&w);
    let subst = match item {
        RewriteItem::A => id.set(0, "X0", &[(0, c(k))]).set(1, "Z", &[(1, c(k))]).set(
            2,
            "Y",
            &[(1, c(-1)), (2, c(1))],
        ),
        RewriteItem::B => id.set(1, "Z", &[(0, c(-1)), (1, c(1))]),
        RewriteItem::C | RewriteItem::E => id
            .set(0, "X0", &[(0, c(1))])
            .set(1, "Z", &[(0, c(-k)), (1, c(k))])
            .set(2, "Y", &[(1, c(-1)), (2, c(1))]),
        RewriteItem::D => id.set(1, "Z", &[(0, c(-k)), (1, c(k))]),
    };
    let out = pres_substitute(&w, &subst)?;
    let x_free = out.relations().iter().all(|r| r[0].is_zero());
    let notes = RewriteNotes {
        item,
        new_names: out.gen_names().to_vec(),
        x_free,
        relations: out.describe(),
    };
    Ok((out, notes))
}

/// The most specific applicable rewrite of W_{a,b,m,n}.
pub fn rewrite_reduction(params: &FormalSpaceParams) -> SpaceResult<(Presentation, RewriteNotes)> {
    let item = RewriteItem::choose(params)
        .ok_or_else(|| SpaceError::NotApplicable(format!("{params:?}")))?;
    rewrite_with(item, params)
}
