//! Group ring of the cyclic group G = <σ> of order p^n, with coefficients in
//! Z/p^K (truncated mode) or in Z (exact mode).
//!
//! Elements are stored as the p^n coefficients of Σ c_k σ^k. In truncated mode
//! every coefficient lives in [0, p^K).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::{ComponentField, CycloElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("n must be at least 1")]
    ZeroExponent,
    #[error("precision K = {0} is not usable for p = {1} (need 1 <= K and p^K < 2^62)")]
    BadPrecision(u32, u64),
    #[error("group order p^n = {0}^{1} is too large")]
    GroupTooLarge(u64, u32),
    #[error("ring contexts differ")]
    ContextMismatch,
    #[error("operation needs {0} mode")]
    WrongMode(&'static str),
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: u32, max: u32 },
    #[error("leading coefficient {0} is not invertible")]
    NonUnitLeading(i128),
    #[error("division by zero polynomial")]
    ZeroDivisor,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("cannot parse group ring element: {0}")]
    Parse(String),
}

pub type RingResult<T> = Result<T, RingError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Truncated,
    Exact,
}

/// Shared parameters of a group ring: the prime, the group exponent and the
/// coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ContextJson", into = "ContextJson")]
pub struct RingContext {
    p: u64,
    n: u32,
    precision: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct ContextJson {
    p: u64,
    n: u32,
    #[serde(rename = "K", default)]
    k: Option<u32>,
    mode: Mode,
}

impl TryFrom<ContextJson> for RingContext {
    type Error = RingError;
    fn try_from(j: ContextJson) -> RingResult<Self> {
        match (j.mode, j.k) {
            (Mode::Exact, _) => RingContext::exact(j.p, j.n),
            (Mode::Truncated, Some(k)) => RingContext::truncated(j.p, j.n, k),
            (Mode::Truncated, None) => Err(RingError::BadPrecision(0, j.p)),
        }
    }
}

impl From<RingContext> for ContextJson {
    fn from(c: RingContext) -> Self {
        ContextJson {
            p: c.p,
            n: c.n,
            k: c.precision,
            mode: c.mode(),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// p^e as i128, or None on overflow.
pub fn ipow(p: u64, e: u32) -> Option<i128> {
    (p as i128).checked_pow(e)
}

/// p-adic valuation of a nonzero integer; None for zero.
pub fn valuation(p: u64, x: i128) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let p = p as i128;
    let mut x = x;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

const MODULUS_LIMIT: i128 = 1 << 62;

impl RingContext {
    fn check_group(p: u64, n: u32) -> RingResult<()> {
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        if n == 0 {
            return Err(RingError::ZeroExponent);
        }
        match ipow(p, n) {
            Some(q) if q <= 1 << 16 => Ok(()),
            _ => Err(RingError::GroupTooLarge(p, n)),
        }
    }

    pub fn exact(p: u64, n: u32) -> RingResult<Self> {
        Self::check_group(p, n)?;
        Ok(RingContext {
            p,
            n,
            precision: None,
        })
    }

    pub fn truncated(p: u64, n: u32, k: u32) -> RingResult<Self> {
        Self::check_group(p, n)?;
        match ipow(p, k) {
            Some(m) if k >= 1 && m < MODULUS_LIMIT => Ok(RingContext {
                p,
                n,
                precision: Some(k),
            }),
            _ => Err(RingError::BadPrecision(k, p)),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    pub fn mode(&self) -> Mode {
        if self.precision.is_some() {
            Mode::Truncated
        } else {
            Mode::Exact
        }
    }

    /// |G| = p^n.
    pub fn order(&self) -> usize {
        self.p.pow(self.n) as usize
    }

    /// p^K in truncated mode.
    pub fn modulus(&self) -> Option<i128> {
        self.precision.map(|k| ipow(self.p, k).unwrap())
    }

    /// Same group, coefficients reduced mod p^K.
    pub fn with_precision(&self, k: u32) -> RingResult<Self> {
        RingContext::truncated(self.p, self.n, k)
    }

    pub fn as_exact(&self) -> Self {
        RingContext {
            p: self.p,
            n: self.n,
            precision: None,
        }
    }

    fn reduce(&self, c: i128) -> i128 {
        match self.modulus() {
            Some(m) => c.rem_euclid(m),
            None => c,
        }
    }

    fn add(&self, a: i128, b: i128) -> RingResult<i128> {
        match self.modulus() {
            Some(m) => Ok((a + b).rem_euclid(m)),
            None => a.checked_add(b).ok_or(RingError::Overflow),
        }
    }

    fn mul(&self, a: i128, b: i128) -> RingResult<i128> {
        match self.modulus() {
            // both operands are below 2^62, so the product fits
            Some(m) => Ok((a * b).rem_euclid(m)),
            None => a.checked_mul(b).ok_or(RingError::Overflow),
        }
    }
}

/// Which distinguished element to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Special {
    /// N = Σ_{k<p^n} σ^k
    Norm,
    /// A = Σ_{k<p^n} k σ^k
    Abel,
    /// S_m = Σ_{k<p^m} σ^k
    S(u32),
    /// A_m = Σ_{k<p^{n-m}} k σ^{k p^m}
    Am(u32),
    /// N_m = Σ_{k<p^{n-m}} σ^{k p^m}
    Nm(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ElemJson", into = "ElemJson")]
pub struct GroupRingElem {
    ctx: RingContext,
    coeffs: Vec<i128>,
}

#[derive(Serialize, Deserialize)]
struct ElemJson {
    ctx: RingContext,
    coeffs: Vec<i128>,
}

impl TryFrom<ElemJson> for GroupRingElem {
    type Error = RingError;
    fn try_from(j: ElemJson) -> RingResult<Self> {
        if j.coeffs.len() != j.ctx.order() {
            return Err(RingError::Parse(format!(
                "expected {} coefficients, got {}",
                j.ctx.order(),
                j.coeffs.len()
            )));
        }
        GroupRingElem::new(j.ctx, &j.coeffs)
    }
}

impl From<GroupRingElem> for ElemJson {
    fn from(e: GroupRingElem) -> Self {
        ElemJson {
            ctx: e.ctx,
            coeffs: e.coeffs,
        }
    }
}

impl GroupRingElem {
    /// Builds Σ coeffs[i] σ^i, folding exponents mod p^n and reducing
    /// coefficients into the canonical range.
    pub fn new(ctx: RingContext, coeffs: &[i128]) -> RingResult<Self> {
        let q = ctx.order();
        let mut out = vec![0i128; q];
        for (i, &c) in coeffs.iter().enumerate() {
            let c = ctx.reduce(c);
            out[i % q] = ctx.add(out[i % q], c)?;
        }
        Ok(GroupRingElem { ctx, coeffs: out })
    }

    pub fn zero(ctx: RingContext) -> Self {
        GroupRingElem {
            ctx,
            coeffs: vec![0; ctx.order()],
        }
    }

    pub fn constant(ctx: RingContext, c: i128) -> Self {
        let mut e = Self::zero(ctx);
        e.coeffs[0] = ctx.reduce(c);
        e
    }

    pub fn one(ctx: RingContext) -> Self {
        Self::constant(ctx, 1)
    }

    /// σ^j for any integer j.
    pub fn sigma_pow(ctx: RingContext, j: i64) -> Self {
        let mut e = Self::zero(ctx);
        let q = ctx.order() as i64;
        e.coeffs[j.rem_euclid(q) as usize] = 1;
        e
    }

    /// Sum of c·σ^e over the given terms.
    pub fn from_terms(ctx: RingContext, terms: &[(i64, i128)]) -> RingResult<Self> {
        let q = ctx.order() as i64;
        let mut out = vec![0i128; ctx.order()];
        for &(e, c) in terms {
            let i = e.rem_euclid(q) as usize;
            out[i] = ctx.add(out[i], ctx.reduce(c))?;
        }
        Ok(GroupRingElem { ctx, coeffs: out })
    }

    pub fn special(ctx: RingContext, which: Special) -> RingResult<Self> {
        let (p, n) = (ctx.p, ctx.n);
        let check = |m: u32| {
            if m > n {
                Err(RingError::IndexOutOfRange { index: m, max: n })
            } else {
                Ok(())
            }
        };
        let terms: Vec<(i64, i128)> = match which {
            Special::Norm => (0..ctx.order() as i64).map(|k| (k, 1)).collect(),
            Special::Abel => (0..ctx.order() as i64).map(|k| (k, k as i128)).collect(),
            Special::S(m) => {
                check(m)?;
                (0..p.pow(m) as i64).map(|k| (k, 1)).collect()
            }
            Special::Am(m) => {
                check(m)?;
                let step = p.pow(m) as i64;
                (0..p.pow(n - m) as i64)
                    .map(|k| (k * step, k as i128))
                    .collect()
            }
            Special::Nm(m) => {
                check(m)?;
                let step = p.pow(m) as i64;
                (0..p.pow(n - m) as i64).map(|k| (k * step, 1)).collect()
            }
        };
        Self::from_terms(ctx, &terms)
    }

    pub fn ctx(&self) -> RingContext {
        self.ctx
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_ctx(&self, other: &Self) -> RingResult<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(RingError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> RingResult<Self> {
        self.same_ctx(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| self.ctx.add(a, b))
            .collect::<RingResult<Vec<_>>>()?;
        Ok(GroupRingElem {
            ctx: self.ctx,
            coeffs,
        })
    }

    pub fn neg(&self) -> RingResult<Self> {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Self) -> RingResult<Self> {
        self.add(&other.neg()?)
    }

    pub fn scale(&self, c: i128) -> RingResult<Self> {
        let c = self.ctx.reduce(c);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| self.ctx.mul(a, c))
            .collect::<RingResult<Vec<_>>>()?;
        Ok(GroupRingElem {
            ctx: self.ctx,
            coeffs,
        })
    }

    /// Multiplication by σ^j, a cyclic rotation of the coefficients.
    pub fn shift(&self, j: i64) -> Self {
        let q = self.coeffs.len() as i64;
        let mut out = vec![0; q as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[(i as i64 + j).rem_euclid(q) as usize] = c;
        }
        GroupRingElem {
            ctx: self.ctx,
            coeffs: out,
        }
    }

    /// Cyclic convolution.
    pub fn mul(&self, other: &Self) -> RingResult<Self> {
        self.same_ctx(other)?;
        let q = self.coeffs.len();
        let mut out = vec![0i128; q];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let k = (i + j) % q;
                out[k] = self.ctx.add(out[k], self.ctx.mul(a, b)?)?;
            }
        }
        Ok(GroupRingElem {
            ctx: self.ctx,
            coeffs: out,
        })
    }

    pub fn pow(&self, e: u32) -> RingResult<Self> {
        let mut acc = Self::one(self.ctx);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The augmentation Σ c_k, reduced in the coefficient ring.
    pub fn eval_one(&self) -> RingResult<i128> {
        let mut s = 0i128;
        for &c in &self.coeffs {
            s = self.ctx.add(s, c)?;
        }
        Ok(s)
    }

    /// Value of the exact polynomial at an integer point.
    pub fn eval_int(&self, x: i128) -> RingResult<i128> {
        let mut acc = 0i128;
        for &c in self.coeffs.iter().rev() {
            acc = self.ctx.add(self.ctx.mul(acc, x)?, c)?;
        }
        Ok(acc)
    }

    /// Degree as a polynomial of degree < p^n; None for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    /// Reduces an exact element into a truncated context of the same group.
    pub fn truncate(&self, ctx: RingContext) -> RingResult<Self> {
        if ctx.p != self.ctx.p || ctx.n != self.ctx.n {
            return Err(RingError::ContextMismatch);
        }
        GroupRingElem::new(ctx, &self.coeffs)
    }

    /// Coefficients mapped to the symmetric range (-m/2, m/2] in truncated
    /// mode, unchanged in exact mode.
    pub fn symmetric_coeffs(&self) -> Vec<i128> {
        match self.ctx.modulus() {
            Some(m) => self
                .coeffs
                .iter()
                .map(|&c| if c > m / 2 { c - m } else { c })
                .collect(),
            None => self.coeffs.clone(),
        }
    }

    /// Polynomial division u = f·q + r with deg r < deg f.
    ///
    /// The leading coefficient of f must be a unit mod p in truncated mode and
    /// ±1 in exact mode.
    pub fn divmod(&self, f: &Self) -> RingResult<(Self, Self)> {
        self.same_ctx(f)?;
        let df = f.degree().ok_or(RingError::ZeroDivisor)?;
        let lead = f.coeffs[df];
        let inv = match self.ctx.modulus() {
            Some(m) => {
                if lead % self.ctx.p as i128 == 0 {
                    return Err(RingError::NonUnitLeading(lead));
                }
                mod_inverse(lead, m).ok_or(RingError::NonUnitLeading(lead))?
            }
            None => match lead {
                1 => 1,
                -1 => -1,
                _ => return Err(RingError::NonUnitLeading(lead)),
            },
        };
        let mut r = self.coeffs.clone();
        let mut q = vec![0i128; r.len()];
        let du = match self.degree() {
            Some(d) => d,
            None => return Ok((Self::zero(self.ctx), self.clone())),
        };
        let mut i = du as isize;
        while i >= df as isize {
            let iu = i as usize;
            if r[iu] != 0 {
                let t = self.ctx.mul(r[iu], inv)?;
                q[iu - df] = t;
                for j in 0..=df {
                    let sub = self.ctx.mul(t, f.coeffs[j])?;
                    r[iu - df + j] = self.ctx.add(r[iu - df + j], -sub)?;
                }
            }
            i -= 1;
        }
        Ok((
            GroupRingElem {
                ctx: self.ctx,
                coeffs: q,
            },
            GroupRingElem {
                ctx: self.ctx,
                coeffs: r,
            },
        ))
    }

    /// Image in the component field Q[X]/(P_k); exact mode only.
    pub fn eval_component(&self, k: u32) -> RingResult<CycloElem> {
        if self.ctx.mode() != Mode::Exact {
            return Err(RingError::WrongMode("exact"));
        }
        if k > self.ctx.n {
            return Err(RingError::IndexOutOfRange {
                index: k,
                max: self.ctx.n,
            });
        }
        let field = ComponentField::new(self.ctx.p, k);
        Ok(field.from_int_poly(&self.coeffs))
    }

    /// Canonical text form "c0 + c1*s + c2*s^2 + ...", every term present.
    pub fn to_text(&self) -> String {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*s"),
                _ => format!("{c}*s^{i}"),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses sums of terms "c", "c*s", "c*s^e" (and bare "s", "s^e").
    /// Exponents are folded mod p^n.
    pub fn parse_text(ctx: RingContext, text: &str) -> RingResult<Self> {
        let mut terms = Vec::new();
        let cleaned = text.replace(' ', "");
        if cleaned.is_empty() {
            return Err(RingError::Parse("empty input".into()));
        }
        // split on '+' that separate terms; a '-' right after '+' belongs to the coefficient
        for raw in cleaned.split('+') {
            if raw.is_empty() {
                return Err(RingError::Parse(format!("empty term in {text:?}")));
            }
            let (coef, exp) = match raw.split_once('*') {
                Some((c, s)) => (parse_int(c)?, parse_sigma(s)?),
                None if raw.starts_with('s') || raw.starts_with("-s") => {
                    let (sign, s) = raw.strip_prefix('-').map_or((1, raw), |s| (-1, s));
                    (sign, parse_sigma(s)?)
                }
                None => (parse_int(raw)?, 0),
            };
            terms.push((exp, coef));
        }
        Self::from_terms(ctx, &terms)
    }
}

fn parse_int(s: &str) -> RingResult<i128> {
    s.parse::<i128>()
        .map_err(|_| RingError::Parse(format!("bad coefficient {s:?}")))
}

fn parse_sigma(s: &str) -> RingResult<i64> {
    match s {
        "s" => Ok(1),
        _ => s
            .strip_prefix("s^")
            .and_then(|e| e.parse::<i64>().ok())
            .ok_or_else(|| RingError::Parse(format!("bad power {s:?}"))),
    }
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Inverse of a modulo m, when gcd(a, m) = 1.
pub fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r == 1 {
        Some(old_s.rem_euclid(m))
    } else {
        None
    }
}

/// Non-cyclic product of two coefficient lists, used to compare B·C with
/// X^{p^n} - 1 as polynomials.
pub fn poly_mul(a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
    if a.is_empty() || b.is_empty() {
        return Some(Vec::new());
    }
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j].checked_add(x.checked_mul(y)?)?;
        }
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32, k: u32) -> RingContext {
        RingContext::truncated(p, n, k).unwrap()
    }

    #[test]
    fn make_folds_and_reduces() {
        let c = ctx(2, 1, 3);
        assert_eq!(
            GroupRingElem::new(c, &[1, 1]).unwrap(),
            GroupRingElem::special(c, Special::Norm).unwrap()
        );
        assert_eq!(
            GroupRingElem::new(c, &[0, 1, 0, 1]).unwrap().coeffs(),
            &[0, 2]
        );
        assert_eq!(
            GroupRingElem::new(ctx(3, 1, 2), &[10]).unwrap().coeffs(),
            &[1, 0, 0]
        );
        assert_eq!(GroupRingElem::new(c, &[-1]).unwrap().coeffs(), &[7, 0]);
    }

    #[test]
    fn norm_is_killed_by_one_minus_sigma() {
        let c = ctx(3, 2, 4);
        let n = GroupRingElem::special(c, Special::Norm).unwrap();
        let d = GroupRingElem::from_terms(c, &[(0, 1), (1, -1)]).unwrap();
        assert!(d.mul(&n).unwrap().is_zero());
    }

    #[test]
    fn tower_s_m_identity() {
        let c = RingContext::exact(3, 2).unwrap();
        let s1 = GroupRingElem::special(c, Special::S(1)).unwrap();
        assert_eq!(s1.coeffs()[..4], [1, 1, 1, 0]);
        let d = GroupRingElem::from_terms(c, &[(0, 1), (1, -1)]).unwrap();
        let expect = GroupRingElem::from_terms(c, &[(0, 1), (3, -1)]).unwrap();
        assert_eq!(d.mul(&s1).unwrap(), expect);
    }

    #[test]
    fn specials_small() {
        let c = RingContext::exact(2, 1).unwrap();
        assert_eq!(
            GroupRingElem::special(c, Special::Abel).unwrap().coeffs(),
            &[0, 1]
        );
        let c = RingContext::exact(2, 2).unwrap();
        assert_eq!(
            GroupRingElem::special(c, Special::Nm(1)).unwrap().coeffs(),
            &[1, 0, 1, 0]
        );
        assert!(GroupRingElem::special(c, Special::S(3)).is_err());
    }

    #[test]
    fn eval_one_values() {
        for (p, n) in [(2u64, 1u32), (3, 2), (5, 1), (2, 3)] {
            let c = RingContext::exact(p, n).unwrap();
            let q = p.pow(n) as i128;
            assert_eq!(
                GroupRingElem::special(c, Special::Norm)
                    .unwrap()
                    .eval_one()
                    .unwrap(),
                q
            );
            assert_eq!(
                GroupRingElem::special(c, Special::Abel)
                    .unwrap()
                    .eval_one()
                    .unwrap(),
                q * (q - 1) / 2
            );
            let d = GroupRingElem::from_terms(c, &[(0, 1), (1, -1)]).unwrap();
            assert_eq!(d.eval_one().unwrap(), 0);
        }
    }

    #[test]
    fn divmod_examples() {
        let c = RingContext::exact(2, 1).unwrap();
        let s = GroupRingElem::sigma_pow(c, 1);
        let n = GroupRingElem::special(c, Special::Norm).unwrap();
        let (q, r) = s.divmod(&n).unwrap();
        assert_eq!(q.coeffs(), &[1, 0]);
        assert_eq!(r.coeffs(), &[-1, 0]);
        let (q, r) = n.divmod(&n).unwrap();
        assert_eq!((q.coeffs(), r.is_zero()), (&[1, 0][..], true));
        let two = GroupRingElem::constant(c, 2);
        assert!(s.divmod(&two).is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = ctx(3, 1, 2);
        let e = GroupRingElem::new(c, &[4, 0, 8]).unwrap();
        assert_eq!(e.to_text(), "4 + 0*s + 8*s^2");
        assert_eq!(GroupRingElem::parse_text(c, &e.to_text()).unwrap(), e);
        let x = RingContext::exact(3, 1).unwrap();
        let e = GroupRingElem::parse_text(x, "1 + -1*s").unwrap();
        assert_eq!(e.coeffs(), &[1, -1, 0]);
        assert_eq!(
            GroupRingElem::parse_text(x, "s^2 + -s").unwrap().coeffs(),
            &[0, -1, 1]
        );
        assert!(GroupRingElem::parse_text(x, "1 + t").is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = ctx(2, 2, 5);
        let e = GroupRingElem::new(c, &[1, 2, 3, 31]).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"{"ctx":{"p":2,"n":2,"K":5,"mode":"truncated"},"coeffs":[1,2,3,31]}"#
        );
        let back: GroupRingElem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<GroupRingElem>(
            r#"{"ctx":{"p":4,"n":1,"mode":"exact"},"coeffs":[1,2,3,4]}"#
        )
        .is_err());
    }

    #[test]
    fn component_needs_exact_mode() {
        let c = ctx(2, 1, 3);
        assert!(GroupRingElem::one(c).eval_component(0).is_err());
    }
}
