//! Measurements on presented modules: elementary divisors, rank and torsion,
//! the cohomology groups H(B, C, W), Herbrand quotients, characters, element
//! orders and the direct-factor test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::ComponentField;
use crate::group_ring::{poly_mul, valuation, GroupRingElem, RingContext, RingError};
use crate::linalg::{snf, snf_with_transforms, Mat, RowSolver, SnfResult, Zpk};
use crate::presentation::{
    ElementExpr, FiniteModel, LatticeModel, Presentation, PresentationError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("B·C is not ±(X^(p^n) - 1)")]
    BadFactorisation,
    #[error("exactly one of B(1), C(1) must vanish")]
    AugmentationCondition,
    #[error("{what} differs between precisions {k1} and {k2}")]
    Unstable { what: String, k1: u32, k2: u32 },
    #[error("cohomology group is infinite")]
    Infinite,
    #[error("precision K = {0} unusable")]
    Precision(u32),
    #[error("sub-generator {0} is zero")]
    DegenerateGenerator(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type InvResult<T> = Result<T, InvariantError>;

/// A power of a prime, p^exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PPower {
    pub p: u64,
    pub exponent: u32,
}

impl PPower {
    pub fn new(p: u64, exponent: u32) -> Self {
        PPower { p, exponent }
    }

    pub fn value(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.exponent as usize)
    }
}

impl std::fmt::Display for PPower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}^{}", self.p, self.exponent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub zp_rank: usize,
    /// e for each summand Z/p^e of the torsion, ascending
    pub torsion_divisors: Vec<u32>,
    pub h0_order: PPower,
    pub h1_order: PPower,
    pub character: Vec<usize>,
    pub torsion_gen_order: Option<PPower>,
    pub stabilized_at: (u32, u32),
}

impl InvariantReport {
    /// Equality of everything but the precisions used.
    pub fn same_invariants(&self, other: &InvariantReport) -> bool {
        self.zp_rank == other.zp_rank
            && self.torsion_divisors == other.torsion_divisors
            && self.h0_order == other.h0_order
            && self.h1_order == other.h1_order
            && self.character == other.character
            && self.torsion_gen_order == other.torsion_gen_order
    }

    /// Field-by-field differences, for reports.
    pub fn diff(&self, other: &InvariantReport) -> Vec<String> {
        let mut out = Vec::new();
        if self.zp_rank != other.zp_rank {
            out.push(format!("zp_rank: {} vs {}", self.zp_rank, other.zp_rank));
        }
        if self.torsion_divisors != other.torsion_divisors {
            out.push(format!(
                "torsion_divisors: {:?} vs {:?}",
                self.torsion_divisors, other.torsion_divisors
            ));
        }
        if self.h0_order != other.h0_order {
            out.push(format!("h0_order: {} vs {}", self.h0_order, other.h0_order));
        }
        if self.h1_order != other.h1_order {
            out.push(format!("h1_order: {} vs {}", self.h1_order, other.h1_order));
        }
        if self.character != other.character {
            out.push(format!(
                "character: {:?} vs {:?}",
                self.character, other.character
            ));
        }
        if self.torsion_gen_order != other.torsion_gen_order {
            out.push(format!(
                "torsion_gen_order: {:?} vs {:?}",
                self.torsion_gen_order, other.torsion_gen_order
            ));
        }
        out
    }

    pub fn torsion_order(&self) -> u32 {
        self.torsion_divisors.iter().sum()
    }

    /// h0/h1 as an exact rational.
    pub fn herbrand(&self) -> BigRational {
        BigRational::new(self.h0_order.value(), self.h1_order.value())
    }
}

fn ring(p: u64, k: u32) -> InvResult<Zpk> {
    Zpk::new(p, k).ok_or(InvariantError::Precision(k))
}

/// Elementary divisors of a matrix over Z/p^K.
pub fn snf_exponents(r: &Zpk, m: &Mat) -> SnfResult {
    snf(r, m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleStructure {
    pub zp_rank: usize,
    pub torsion_divisors: Vec<u32>,
    pub stabilized: bool,
}

pub fn lattice_structure(model: &LatticeModel, k1: u32, k2: u32) -> InvResult<ModuleStructure> {
    if k1 >= k2 {
        return Err(InvariantError::Precision(k1));
    }
    let read = |k: u32| -> InvResult<SnfResult> {
        let fm = model.truncate(k)?;
        Ok(snf(&fm.ring(), &fm.relation_matrix))
    };
    let s1 = read(k1)?;
    let s2 = read(k2)?;
    let stabilized = s1.torsion() == s2.torsion() && s1.free_count() == s2.free_count();
    Ok(ModuleStructure {
        zp_rank: s1.free_count(),
        torsion_divisors: s1.torsion(),
        stabilized,
    })
}

/// Rank and torsion read at two precisions.
pub fn module_structure(pres: &Presentation, k1: u32, k2: u32) -> InvResult<ModuleStructure> {
    lattice_structure(&LatticeModel::from_presentation(pres), k1, k2)
}

/// Order and elementary divisors of a finite group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cohomology {
    pub order: PPower,
    pub divisors: Vec<u32>,
}

fn check_bc(ctx: RingContext, b: &GroupRingElem, c: &GroupRingElem) -> InvResult<()> {
    let q = ctx.order();
    let prod = poly_mul(b.coeffs(), c.coeffs()).ok_or(RingError::Overflow)?;
    let mut target = vec![0i128; q + 1];
    target[0] = -1;
    target[q] = 1;
    let mut prod = prod;
    while prod.last() == Some(&0) {
        prod.pop();
    }
    let neg: Vec<i128> = target.iter().map(|x| -x).collect();
    if prod != target && prod != neg {
        return Err(InvariantError::BadFactorisation);
    }
    let (b1, c1) = (b.eval_one()?, c.eval_one()?);
    if (b1 == 0) == (c1 == 0) {
        return Err(InvariantError::AugmentationCondition);
    }
    Ok(())
}

/// log_p of the cokernel order and free count of the row space of `rows`.
fn cokernel_size(r: &Zpk, rows: &Mat) -> (u32, usize) {
    let s = snf(r, rows);
    (s.log_order(), s.free_count())
}

fn cohomology_at(
    model: &FiniteModel,
    b: &GroupRingElem,
    c: &GroupRingElem,
) -> InvResult<Cohomology> {
    let r = model.ring();
    let k = model.precision;
    let nn = model.ambient_rank;
    let d = &model.relation_matrix;
    let mb = model.action_matrix(b);
    let mc = model.action_matrix(c);

    // L1 = {x : x·B ∈ D}: x-part of the left kernel of [M_B; -D]
    let mut neg_d = d.clone();
    for x in neg_d.data.iter_mut() {
        *x = r.sub(0, *x);
    }
    let phi = mb.stack(&neg_d);
    let solver = RowSolver::new(r, &phi);
    // the kernel rows are exact only modulo p^{K - max pivot valuation}
    let lost = solver.valuations().iter().copied().max().unwrap_or(0);
    let k = k
        .checked_sub(lost)
        .filter(|&x| x >= 1)
        .ok_or(InvariantError::Precision(k))?;
    let r = ring(r.p, k)?;
    let reduce = |rows: Vec<Vec<u64>>| -> Vec<Vec<u64>> {
        rows.into_iter()
            .map(|v| v.into_iter().map(|x| x % r.modulus).collect::<Vec<_>>())
            .filter(|v| v.iter().any(|&x| x != 0))
            .collect()
    };
    let mut l1_rows: Vec<Vec<u64>> = solver
        .left_kernel()
        .into_iter()
        .map(|u| u[..nn].to_vec())
        .collect();
    l1_rows.extend(d.to_rows());
    let l1 = Mat::from_rows(nn, &reduce(l1_rows));

    // L2 = C·F + D
    let l2 = Mat::from_rows(nn, &reduce(mc.stack(d).to_rows()));

    let (o1, f1) = cokernel_size(&r, &l1);
    let (o2, f2) = cokernel_size(&r, &l2);
    if f1 != f2 || o2 < o1 {
        return Err(InvariantError::Infinite);
    }

    // divisors: coordinates of L2 in a basis of L1
    let t = snf_with_transforms(&r, &l1);
    let maxv = t.valuations.iter().copied().max().unwrap_or(0);
    let rank1 = t.valuations.len();
    let kk = k
        .checked_sub(maxv)
        .filter(|&x| x >= 1)
        .ok_or(InvariantError::Precision(k))?;
    let r2 = ring(r.p, kk)?;
    let mut coords = Vec::new();
    for i in 0..l2.rows {
        let w = t.v.vec_mul(&r, l2.row(i));
        let row: Vec<u64> = (0..rank1)
            .map(|j| {
                let pv = r.p.pow(t.valuations[j]);
                r2.reduce((w[j] / pv) as i128)
            })
            .collect();
        coords.push(row);
    }
    let rel = snf(&r2, &Mat::from_rows(rank1, &coords));
    let divisors = rel.exponents.clone();
    if divisors.iter().any(|&e| e >= kk) || rel.log_order() != o2 - o1 {
        return Err(InvariantError::Unstable {
            what: "cohomology divisors".into(),
            k1: k,
            k2: kk,
        });
    }
    Ok(Cohomology {
        order: PPower::new(r.p, o2 - o1),
        divisors,
    })
}

/// |ker B / im C| on a lattice model, read at K and K+1.
pub fn lattice_cohomology(
    model: &LatticeModel,
    b: &GroupRingElem,
    c: &GroupRingElem,
    k: u32,
) -> InvResult<Cohomology> {
    let ctx = b.ctx();
    if ctx.p() != model.p || ctx.n() != model.n || c.ctx() != ctx {
        return Err(RingError::ContextMismatch.into());
    }
    check_bc(ctx, b, c)?;
    let h1 = cohomology_at(&model.truncate(k)?, b, c)?;
    let h2 = cohomology_at(&model.truncate(k + 1)?, b, c)?;
    if h1 != h2 {
        return Err(InvariantError::Unstable {
            what: "cohomology".into(),
            k1: k,
            k2: k + 1,
        });
    }
    Ok(h1)
}

pub fn cohomology_bc(
    pres: &Presentation,
    b: &GroupRingElem,
    c: &GroupRingElem,
    k: u32,
) -> InvResult<Cohomology> {
    lattice_cohomology(&LatticeModel::from_presentation(pres), b, c, k)
}

/// (|H^0|, |H^1|) with H^0 = ker(1-σ)/im N and H^1 = ker N/im(1-σ).
pub fn lattice_tate(model: &LatticeModel, k: u32) -> InvResult<(PPower, PPower)> {
    let ctx = RingContext::exact(model.p, model.n)?;
    let one_minus = GroupRingElem::from_terms(ctx, &[(0, 1), (1, -1)])?;
    let norm = GroupRingElem::special(ctx, crate::group_ring::Special::Norm)?;
    let h0 = lattice_cohomology(model, &one_minus, &norm, k)?;
    let h1 = lattice_cohomology(model, &norm, &one_minus, k)?;
    Ok((h0.order, h1.order))
}

/// q = |H^0| / |H^1|.
pub fn herbrand_quotient(pres: &Presentation, k: u32) -> InvResult<BigRational> {
    let (h0, h1) = lattice_tate(&LatticeModel::from_presentation(pres), k)?;
    Ok(BigRational::new(h0.value(), h1.value()))
}

/// m_k = g - rank of the rows over Q[X]/(P_k), k = 0..n.
pub fn character_multiplicities(pres: &Presentation) -> InvResult<Vec<usize>> {
    let ctx = pres.ctx();
    let mut out = Vec::new();
    for k in 0..=ctx.n() {
        let field = ComponentField::new(ctx.p(), k);
        let rows = pres
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.eval_component(k))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(pres.g() - field.rank(&rows));
    }
    Ok(out)
}

/// Rank over Q by fraction-free elimination.
pub fn bareiss_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for i in rank + 1..m.len() {
            for j in c + 1..cols {
                let v = &m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

fn int_mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(BigInt::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

/// Character of a lattice model: m_k = (N - rank_Q[P_k(Σ); D]) / deg P_k.
pub fn lattice_character(model: &LatticeModel) -> Vec<usize> {
    let n_amb = model.ambient;
    let sigma: Vec<Vec<BigInt>> = model
        .sigma
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let ident: Vec<Vec<BigInt>> = (0..n_amb)
        .map(|i| {
            (0..n_amb)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let rel: Vec<Vec<BigInt>> = model
        .relations
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let p = model.p as usize;
    // Σ^{p^j} for j = 0..n
    let mut powers = vec![sigma.clone()];
    for _ in 0..model.n {
        let last = powers.last().unwrap().clone();
        let mut acc = ident.clone();
        for _ in 0..p {
            acc = int_mat_mul(&acc, &last);
        }
        powers.push(acc);
    }
    let mut out = Vec::new();
    for k in 0..=model.n as usize {
        let (pk, deg) = if k == 0 {
            let m: Vec<Vec<BigInt>> = sigma
                .iter()
                .zip(&ident)
                .map(|(s, i)| s.iter().zip(i).map(|(a, b)| a - b).collect())
                .collect();
            (m, 1)
        } else {
            // Σ_{j<p} (Σ^{p^{k-1}})^j
            let base = &powers[k - 1];
            let mut term = ident.clone();
            let mut acc = ident.clone();
            for _ in 1..p {
                term = int_mat_mul(&term, base);
                for (ar, tr) in acc.iter_mut().zip(&term) {
                    for (a, t) in ar.iter_mut().zip(tr) {
                        *a += t;
                    }
                }
            }
            (acc, p.pow(k as u32) - p.pow(k as u32 - 1))
        };
        let mut stacked = pk;
        stacked.extend(rel.iter().cloned());
        let rank = bareiss_rank(&stacked);
        out.push((n_amb - rank) / deg);
    }
    out
}

/// Least e ≤ K-2 with p^e·v in the relation module, or None.
pub fn element_order(pres: &Presentation, v: &ElementExpr, k: u32) -> InvResult<Option<PPower>> {
    if v.exponents.len() != pres.g() {
        return Err(InvariantError::Shape(
            "element does not match the presentation".into(),
        ));
    }
    let model = LatticeModel::from_presentation(pres);
    lattice_element_order(&model, &v.flatten(), k)
}

pub fn lattice_element_order(
    model: &LatticeModel,
    v: &[i128],
    k: u32,
) -> InvResult<Option<PPower>> {
    let fm = model.truncate(k)?;
    let r = fm.ring();
    let target: Vec<u64> = v.iter().map(|&x| r.reduce(x)).collect();
    let solver = RowSolver::new(r, &fm.relation_matrix);
    Ok(solver
        .order_exponent(&target)
        .filter(|&e| e + 2 <= k)
        .map(|e| PPower::new(model.p, e)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectFactor {
    pub direct_factor: bool,
    /// false when the truncated ambient module shows torsion, in which case the
    /// verdict is outside the criterion's hypotheses
    pub ambient_torsion_free: bool,
}

/// ⟨l_i⟩ is a direct factor of M = F/D iff the l_i stay independent in M/pM.
pub fn direct_factor_test(model: &FiniteModel, sub_gens: &[Vec<u64>]) -> InvResult<DirectFactor> {
    let r = model.ring();
    let nn = model.ambient_rank;
    for (i, g) in sub_gens.iter().enumerate() {
        if g.len() != nn {
            return Err(InvariantError::Shape(format!(
                "sub-generator {i} has wrong length"
            )));
        }
        if g.iter().all(|&x| r.reduce(x as i128) == 0) {
            return Err(InvariantError::DegenerateGenerator(i));
        }
    }
    let fp = ring(r.p, 1)?;
    let red = |rows: Vec<Vec<u64>>| -> Vec<Vec<u64>> {
        rows.into_iter()
            .map(|v| v.into_iter().map(|x| x % r.p).collect())
            .collect()
    };
    let d_rows = red(model.relation_matrix.to_rows());
    let base = RowSolver::new(fp, &Mat::from_rows(nn, &d_rows)).rank();
    let mut all = d_rows;
    all.extend(red(sub_gens.to_vec()));
    let full = RowSolver::new(fp, &Mat::from_rows(nn, &all)).rank();
    let s = snf(&r, &model.relation_matrix);
    Ok(DirectFactor {
        direct_factor: full - base == sub_gens.len(),
        ambient_torsion_free: s.torsion().is_empty(),
    })
}

/// Default precision for a presentation: 4 + 2n + the largest p-valuation
/// appearing in a row entry or its augmentation.
pub fn default_precision(pres: &Presentation) -> u32 {
    let p = pres.ctx().p();
    let mut maxv = 0;
    for row in pres.rows() {
        for e in row {
            for &c in e.coeffs() {
                if let Some(v) = valuation(p, c) {
                    maxv = maxv.max(v);
                }
            }
            if let Some(v) = e.eval_one().ok().and_then(|x| valuation(p, x)) {
                maxv = maxv.max(v);
            }
        }
    }
    4 + 2 * pres.ctx().n() + maxv
}

/// Full report of a lattice model; `character` is supplied by the caller so
/// presentations can use the component-field engine.
pub fn measure_lattice(
    model: &LatticeModel,
    character: Vec<usize>,
    k1: u32,
    k2: u32,
    torsion_gen: Option<&[i128]>,
) -> InvResult<InvariantReport> {
    let st = lattice_structure(model, k1, k2)?;
    if !st.stabilized {
        return Err(InvariantError::Unstable {
            what: "module structure".into(),
            k1,
            k2,
        });
    }
    let (h0, h1) = lattice_tate(model, k1)?;
    let (h0b, h1b) = lattice_tate(model, k2)?;
    if (h0, h1) != (h0b, h1b) {
        return Err(InvariantError::Unstable {
            what: "Tate cohomology".into(),
            k1,
            k2,
        });
    }
    let torsion_gen_order = match torsion_gen {
        None => None,
        Some(v) => {
            let a = lattice_element_order(model, v, k1)?;
            let b = lattice_element_order(model, v, k2)?;
            if a != b {
                return Err(InvariantError::Unstable {
                    what: "torsion generator order".into(),
                    k1,
                    k2,
                });
            }
            a
        }
    };
    Ok(InvariantReport {
        zp_rank: st.zp_rank,
        torsion_divisors: st.torsion_divisors,
        h0_order: h0,
        h1_order: h1,
        character,
        torsion_gen_order,
        stabilized_at: (k1, k2),
    })
}

pub fn measure_report(
    pres: &Presentation,
    k1: u32,
    k2: u32,
    torsion_gen: Option<&ElementExpr>,
) -> InvResult<InvariantReport> {
    let model = LatticeModel::from_presentation(pres);
    let flat = torsion_gen.map(|v| v.flatten());
    measure_lattice(
        &model,
        character_multiplicities(pres)?,
        k1,
        k2,
        flat.as_deref(),
    )
}

/// Σ m_k · deg V_k.
pub fn rank_from_character(p: u64, character: &[usize]) -> usize {
    character
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let deg = if k == 0 {
                1
            } else {
                (p.pow(k as u32) - p.pow(k as u32 - 1)) as usize
            };
            m * deg
        })
        .sum()
}

/// Rational number helper for callers comparing Herbrand quotients.
pub fn rational_ppower(p: u64, e: i64) -> BigRational {
    let v = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(v)
    } else {
        BigRational::new(BigInt::one(), v)
    }
}
