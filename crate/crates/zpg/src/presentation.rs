//! Finitely presented Z_p[G]-modules: generators, relation rows with entries in
//! the group ring, truncation to finite models over Z/p^K, membership tests and
//! monomial changes of variables.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group_ring::{GroupRingElem, Mode, RingContext, RingError};
use crate::linalg::{Mat, RowSolver, Zpk};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("duplicate generator name {0:?}")]
    DuplicateName(String),
    #[error("relation rows must use exact-integer coefficients over the presentation context")]
    RowContext,
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("substitution is not triangular")]
    NotTriangular,
    #[error("diagonal exponent of generator {0} is not a unit monomial")]
    NonUnitDiagonal(usize),
    #[error("transported row has a denominator divisible by p")]
    NonIntegral,
    #[error("precision K = {0} unusable")]
    Precision(u32),
}

pub type PresResult<T> = Result<T, PresentationError>;

pub type Row = Vec<GroupRingElem>;

/// A module ⟨gens⟩ / ⟨rows⟩ over Z_p[G].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    ctx: RingContext,
    gen_names: Vec<String>,
    relations: Vec<Row>,
    rows: Vec<Row>,
    invariant_gens: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    ctx: RingContext,
    gen_names: Vec<String>,
    rows: Vec<Vec<Vec<i128>>>,
    #[serde(default)]
    invariant_gens: Vec<usize>,
}

impl Serialize for Presentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PresentationJson {
            ctx: self.ctx,
            gen_names: self.gen_names.clone(),
            rows: self
                .relations
                .iter()
                .map(|r| r.iter().map(|e| e.coeffs().to_vec()).collect())
                .collect(),
            invariant_gens: self.invariant_gens.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Presentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PresentationJson::deserialize(d)?;
        let ctx = j.ctx;
        let rows = j
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| GroupRingElem::new(ctx, c))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        pres_make(ctx, j.gen_names, rows, j.invariant_gens).map_err(serde::de::Error::custom)
    }
}

/// Builds a presentation, appending the row (1-σ)·e_i for each invariant
/// generator i.
pub fn pres_make(
    ctx: RingContext,
    gen_names: Vec<String>,
    rows: Vec<Row>,
    invariant_gens: Vec<usize>,
) -> PresResult<Presentation> {
    if ctx.mode() != Mode::Exact {
        return Err(PresentationError::RowContext);
    }
    let g = gen_names.len();
    let mut seen = BTreeSet::new();
    for name in &gen_names {
        if !seen.insert(name.as_str()) {
            return Err(PresentationError::DuplicateName(name.clone()));
        }
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != g {
            return Err(PresentationError::Shape(format!(
                "row {i} has {} entries, expected {g}",
                r.len()
            )));
        }
        if r.iter().any(|e| e.ctx() != ctx) {
            return Err(PresentationError::RowContext);
        }
    }
    let inv: BTreeSet<usize> = invariant_gens.iter().copied().collect();
    if let Some(&bad) = inv.iter().find(|&&i| i >= g) {
        return Err(PresentationError::IndexOutOfRange(bad));
    }
    let invariant_gens: Vec<usize> = inv.into_iter().collect();
    let mut all = rows.clone();
    let one_minus_sigma = GroupRingElem::from_terms(ctx, &[(0, 1), (1, -1)])?;
    for &i in &invariant_gens {
        let mut r = vec![GroupRingElem::zero(ctx); g];
        r[i] = one_minus_sigma.clone();
        all.push(r);
    }
    Ok(Presentation {
        ctx,
        gen_names,
        relations: rows,
        rows: all,
        invariant_gens,
    })
}

/// The free module Z_p[G]^g on the given names.
pub fn free_module(ctx: RingContext, names: &[&str]) -> PresResult<Presentation> {
    pres_make(
        ctx,
        names.iter().map(|s| s.to_string()).collect(),
        Vec::new(),
        Vec::new(),
    )
}

impl Presentation {
    pub fn ctx(&self) -> RingContext {
        self.ctx
    }

    pub fn g(&self) -> usize {
        self.gen_names.len()
    }

    pub fn gen_names(&self) -> &[String] {
        &self.gen_names
    }

    /// All rows, invariance rows last.
    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Rows as supplied, without the appended invariance rows.
    pub fn relations(&self) -> &[Row] {
        &self.relations
    }

    pub fn invariant_gens(&self) -> &[usize] {
        &self.invariant_gens
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gen_names.iter().position(|n| n == name)
    }

    /// Direct sum; generator names must stay unique.
    pub fn direct_sum(&self, other: &Presentation) -> PresResult<Presentation> {
        if self.ctx != other.ctx {
            return Err(PresentationError::RowContext);
        }
        let g1 = self.g();
        let g2 = other.g();
        let zero = GroupRingElem::zero(self.ctx);
        let mut rows = Vec::new();
        for r in &self.relations {
            let mut row = r.clone();
            row.extend(std::iter::repeat_n(zero.clone(), g2));
            rows.push(row);
        }
        for r in &other.relations {
            let mut row = vec![zero.clone(); g1];
            row.extend(r.iter().cloned());
            rows.push(row);
        }
        let mut names = self.gen_names.clone();
        names.extend(other.gen_names.iter().cloned());
        let mut inv = self.invariant_gens.clone();
        inv.extend(other.invariant_gens.iter().map(|i| i + g1));
        pres_make(self.ctx, names, rows, inv)
    }

    /// The presentation with `k` extra free generators U1..Uk appended.
    pub fn with_free_summands(&self, k: usize) -> PresResult<Presentation> {
        if k == 0 {
            return Ok(self.clone());
        }
        let names: Vec<String> = (1..=k).map(|i| format!("U{i}")).collect();
        let free = pres_make(self.ctx, names, Vec::new(), Vec::new())?;
        self.direct_sum(&free)
    }

    /// Rows rendered in the text form of the group ring, for reports.
    pub fn describe(&self) -> Vec<String> {
        self.relations
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&self.gen_names)
                    .filter(|(e, _)| !e.is_zero())
                    .map(|(e, n)| format!("{n}^({e})"))
                    .collect::<Vec<_>>()
                    .join(" · ")
            })
            .collect()
    }
}

/// An element Π gen_i^{exponents_i} of a presented module, in additive
/// notation a vector of group ring exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementExpr {
    pub exponents: Vec<GroupRingElem>,
}

impl ElementExpr {
    pub fn identity(pres: &Presentation) -> Self {
        ElementExpr {
            exponents: vec![GroupRingElem::zero(pres.ctx()); pres.g()],
        }
    }

    /// The generator with index i.
    pub fn generator(pres: &Presentation, i: usize) -> Self {
        let mut e = Self::identity(pres);
        e.exponents[i] = GroupRingElem::one(pres.ctx());
        e
    }

    /// Builds an element from (generator index, exponent) pairs.
    pub fn from_parts(pres: &Presentation, parts: &[(usize, GroupRingElem)]) -> PresResult<Self> {
        let mut e = Self::identity(pres);
        for (i, x) in parts {
            if *i >= pres.g() {
                return Err(PresentationError::IndexOutOfRange(*i));
            }
            e.exponents[*i] = e.exponents[*i].add(x)?;
        }
        Ok(e)
    }

    /// Product of two elements.
    pub fn combine(&self, other: &ElementExpr) -> PresResult<Self> {
        if self.exponents.len() != other.exponents.len() {
            return Err(PresentationError::Shape("element lengths differ".into()));
        }
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ElementExpr { exponents })
    }

    /// The element raised to a group ring exponent λ.
    pub fn pow(&self, lambda: &GroupRingElem) -> PresResult<Self> {
        let exponents = self
            .exponents
            .iter()
            .map(|a| a.mul(lambda))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ElementExpr { exponents })
    }

    pub fn pow_int(&self, c: i128) -> PresResult<Self> {
        let exponents = self
            .exponents
            .iter()
            .map(|a| a.scale(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ElementExpr { exponents })
    }

    pub fn inverse(&self) -> PresResult<Self> {
        self.pow_int(-1)
    }

    /// The element given by a relation row.
    pub fn from_row(row: &Row) -> Self {
        ElementExpr {
            exponents: row.clone(),
        }
    }

    /// Flattened coordinates: generator-major blocks of p^n coefficients.
    pub fn flatten(&self) -> Vec<i128> {
        self.exponents
            .iter()
            .flat_map(|e| e.coeffs().iter().copied())
            .collect()
    }
}

/// A Z_p-lattice with a σ-action given by integer matrices; the common ground
/// of presentations and hand-built concrete models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeModel {
    pub p: u64,
    /// |G| = p^n
    pub n: u32,
    pub ambient: usize,
    /// Z_p-spanning rows of the relation submodule (σ-stable span)
    pub relations: Vec<Vec<i128>>,
    /// row-vector convention: σ·x = x·sigma
    pub sigma: Vec<Vec<i128>>,
    /// for presentation models: (row index, shift j) so that the entry is σ^j·row
    pub origin: Vec<(usize, usize)>,
}

impl LatticeModel {
    pub fn from_presentation(pres: &Presentation) -> Self {
        let q = pres.ctx().order();
        let g = pres.g();
        let ambient = g * q;
        let mut relations = Vec::new();
        let mut origin = Vec::new();
        for (ri, row) in pres.rows().iter().enumerate() {
            for j in 0..q {
                let v: Vec<i128> = row
                    .iter()
                    .flat_map(|e| e.shift(j as i64).coeffs().to_vec())
                    .collect();
                relations.push(v);
                origin.push((ri, j));
            }
        }
        let mut sigma = vec![vec![0i128; ambient]; ambient];
        for i in 0..g {
            for j in 0..q {
                sigma[i * q + j][i * q + (j + 1) % q] = 1;
            }
        }
        LatticeModel {
            p: pres.ctx().p(),
            n: pres.ctx().n(),
            ambient,
            relations,
            sigma,
            origin,
        }
    }

    pub fn group_order(&self) -> usize {
        self.p.pow(self.n) as usize
    }

    /// Reduction mod p^K; zero and repeated rows are dropped.
    pub fn truncate(&self, k: u32) -> PresResult<FiniteModel> {
        let ring = Zpk::new(self.p, k).ok_or(PresentationError::Precision(k))?;
        let mut seen = BTreeSet::new();
        let mut rows = Vec::new();
        let mut origin = Vec::new();
        for (idx, r) in self.relations.iter().enumerate() {
            let red: Vec<u64> = r.iter().map(|&x| ring.reduce(x)).collect();
            if red.iter().all(|&x| x == 0) || !seen.insert(red.clone()) {
                continue;
            }
            rows.push(red);
            origin.push(self.origin.get(idx).copied().unwrap_or((idx, 0)));
        }
        let sigma: Vec<Vec<u64>> = self
            .sigma
            .iter()
            .map(|r| r.iter().map(|&x| ring.reduce(x)).collect())
            .collect();
        let ctx = RingContext::truncated(self.p, self.n, k)?;
        Ok(FiniteModel {
            ctx,
            precision: k,
            ambient_rank: self.ambient,
            relation_matrix: Mat::from_rows(self.ambient, &rows),
            sigma_matrix: Mat::from_rows(self.ambient, &sigma),
            row_origin: origin,
        })
    }
}

/// Truncation W/p^K W of a presented module, as a finite abelian group with a
/// σ-action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModel {
    pub ctx: RingContext,
    pub precision: u32,
    pub ambient_rank: usize,
    pub relation_matrix: Mat,
    pub sigma_matrix: Mat,
    /// (row of the source presentation, σ-shift) for each relation row
    pub row_origin: Vec<(usize, usize)>,
}

impl FiniteModel {
    pub fn ring(&self) -> Zpk {
        Zpk::new(self.ctx.p(), self.precision).expect("checked at construction")
    }

    /// The matrix of a group ring element acting through sigma_matrix.
    pub fn action_matrix(&self, b: &GroupRingElem) -> Mat {
        let r = self.ring();
        let n = self.ambient_rank;
        let mut acc = Mat::zeros(n, n);
        let mut power = Mat::identity(n);
        for (j, &c) in b.coeffs().iter().enumerate() {
            if j > 0 {
                power = power.mul(&r, &self.sigma_matrix);
            }
            let c = r.reduce(c);
            if c == 0 {
                continue;
            }
            for (x, &y) in acc.data.iter_mut().zip(&power.data) {
                *x = r.add(*x, r.mul(c, y));
            }
        }
        acc
    }

    /// σ^{p^n} acts as the identity on the quotient and σ maps the relation
    /// span into itself.
    pub fn check_invariants(&self) -> bool {
        let r = self.ring();
        let n = self.ambient_rank;
        let mut power = Mat::identity(n);
        for _ in 0..self.ctx.order() {
            power = power.mul(&r, &self.sigma_matrix);
        }
        let solver = RowSolver::new(r, &self.relation_matrix);
        let periodic = (0..n).all(|i| {
            let mut row = power.row(i).to_vec();
            row[i] = r.sub(row[i], 1);
            row.iter().all(|&x| x == 0) || solver.solve(&row).is_some()
        });
        periodic
            && (0..self.relation_matrix.rows).all(|i| {
                let img = self.sigma_matrix.vec_mul(&r, self.relation_matrix.row(i));
                solver.solve(&img).is_some()
            })
    }
}

pub fn pres_truncate(pres: &Presentation, k: u32) -> PresResult<FiniteModel> {
    LatticeModel::from_presentation(pres).truncate(k)
}

fn check_shape(pres: &Presentation, v: &ElementExpr) -> PresResult<()> {
    if v.exponents.len() != pres.g() {
        return Err(PresentationError::Shape(format!(
            "element has {} exponents, presentation has {} generators",
            v.exponents.len(),
            pres.g()
        )));
    }
    Ok(())
}

/// A combination Σ λ_i·row_i over Z/p^K, one λ per row of the presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub precision: u32,
    pub lambda: Vec<GroupRingElem>,
}

impl Witness {
    /// Recomputes Σ λ_i·row_i with the group ring product and compares with v
    /// modulo p^K.
    pub fn verify(&self, pres: &Presentation, v: &ElementExpr) -> bool {
        let Ok(ctx) = pres.ctx().with_precision(self.precision) else {
            return false;
        };
        if self.lambda.len() != pres.rows().len() {
            return false;
        }
        let mut acc = vec![GroupRingElem::zero(ctx); pres.g()];
        for (lam, row) in self.lambda.iter().zip(pres.rows()) {
            for (slot, e) in acc.iter_mut().zip(row) {
                let term = match e.truncate(ctx).and_then(|t| t.mul(lam)) {
                    Ok(t) => t,
                    Err(_) => return false,
                };
                *slot = slot.add(&term).expect("same context");
            }
        }
        acc.iter()
            .zip(&v.exponents)
            .all(|(a, b)| b.truncate(ctx).is_ok_and(|b| &b == a))
    }
}

/// Relation-membership with an explicit witness when v lies in the relation
/// submodule modulo p^K.
pub fn rel_membership_witness(
    pres: &Presentation,
    v: &ElementExpr,
    k: u32,
) -> PresResult<Option<Witness>> {
    check_shape(pres, v)?;
    let model = pres_truncate(pres, k)?;
    let ring = model.ring();
    let target: Vec<u64> = v.flatten().iter().map(|&x| ring.reduce(x)).collect();
    let solver = RowSolver::new(ring, &model.relation_matrix);
    let Some(x) = solver.solve(&target) else {
        return Ok(None);
    };
    let ctx = pres.ctx().with_precision(k)?;
    let mut lambda = vec![GroupRingElem::zero(ctx); pres.rows().len()];
    for (coef, &(ri, j)) in x.iter().zip(&model.row_origin) {
        if *coef == 0 {
            continue;
        }
        let term = GroupRingElem::from_terms(ctx, &[(j as i64, *coef as i128)])?;
        lambda[ri] = lambda[ri].add(&term)?;
    }
    Ok(Some(Witness {
        precision: k,
        lambda,
    }))
}

pub fn rel_membership(pres: &Presentation, v: &ElementExpr, k: u32) -> PresResult<bool> {
    Ok(rel_membership_witness(pres, v, k)?.is_some())
}

// ---------------------------------------------------------------------------
// Changes of variables

/// new_j = Π_i old_i^{matrix[j][i]}; triangular with unit monomial diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub new_names: Vec<String>,
    pub matrix: Vec<Vec<GroupRingElem>>,
}

impl Substitution {
    pub fn identity(pres: &Presentation) -> Self {
        let ctx = pres.ctx();
        let g = pres.g();
        let matrix = (0..g)
            .map(|j| {
                (0..g)
                    .map(|i| {
                        if i == j {
                            GroupRingElem::one(ctx)
                        } else {
                            GroupRingElem::zero(ctx)
                        }
                    })
                    .collect()
            })
            .collect();
        Substitution {
            new_names: pres.gen_names().to_vec(),
            matrix,
        }
    }

    /// Starts from the identity and sets new generator j to Π old_i^{e_i}.
    pub fn set(mut self, j: usize, name: &str, parts: &[(usize, GroupRingElem)]) -> Self {
        let ctx = self.matrix[j][j].ctx();
        for x in self.matrix[j].iter_mut() {
            *x = GroupRingElem::zero(ctx);
        }
        for (i, e) in parts {
            self.matrix[j][*i] = self.matrix[j][*i].add(e).expect("same context");
        }
        self.new_names[j] = name.to_string();
        self
    }
}

/// Group ring element with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
struct QElem(Vec<BigRational>);

impl QElem {
    fn from_exact(e: &GroupRingElem) -> Self {
        QElem(
            e.coeffs()
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    fn zero(q: usize) -> Self {
        QElem(vec![BigRational::zero(); q])
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    fn add(&self, o: &QElem) -> QElem {
        QElem(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, o: &QElem) -> QElem {
        QElem(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    fn mul(&self, o: &QElem) -> QElem {
        let q = self.0.len();
        let mut out = vec![BigRational::zero(); q];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if !b.is_zero() {
                    out[(i + j) % q] += a * b;
                }
            }
        }
        QElem(out)
    }

    /// Inverse of ±c·σ^s with c prime to p.
    fn monomial_inverse(&self, p: u64) -> Option<QElem> {
        let nz: Vec<usize> = (0..self.0.len())
            .filter(|&i| !self.0[i].is_zero())
            .collect();
        if nz.len() != 1 {
            return None;
        }
        let s = nz[0];
        let c = &self.0[s];
        if !c.is_integer() || (c.to_integer() % BigInt::from(p)).is_zero() {
            return None;
        }
        let q = self.0.len();
        let mut out = Self::zero(q);
        out.0[(q - s) % q] = c.recip();
        Some(out)
    }
}

fn is_lower(m: &[Vec<GroupRingElem>]) -> bool {
    m.iter()
        .enumerate()
        .all(|(j, r)| r.iter().skip(j + 1).all(|e| e.is_zero()))
}

fn is_upper(m: &[Vec<GroupRingElem>]) -> bool {
    m.iter()
        .enumerate()
        .all(|(j, r)| r.iter().take(j).all(|e| e.is_zero()))
}

/// Inverse of a triangular matrix with monomial unit diagonal, by Gauss-Jordan
/// with diagonal pivots.
fn triangular_inverse(p: u64, m: &[Vec<GroupRingElem>]) -> PresResult<Vec<Vec<QElem>>> {
    let g = m.len();
    if !(is_lower(m) || is_upper(m)) {
        return Err(PresentationError::NotTriangular);
    }
    let q = m[0][0].ctx().order();
    let mut a: Vec<Vec<QElem>> = m
        .iter()
        .map(|r| r.iter().map(QElem::from_exact).collect())
        .collect();
    let mut inv: Vec<Vec<QElem>> = (0..g)
        .map(|i| {
            (0..g)
                .map(|j| {
                    let mut e = QElem::zero(q);
                    if i == j {
                        e.0[0] = BigRational::one();
                    }
                    e
                })
                .collect()
        })
        .collect();
    let order: Vec<usize> = if is_lower(m) {
        (0..g).collect()
    } else {
        (0..g).rev().collect()
    };
    for &t in &order {
        let piv = a[t][t]
            .monomial_inverse(p)
            .ok_or(PresentationError::NonUnitDiagonal(t))?;
        for j in 0..g {
            a[t][j] = a[t][j].mul(&piv);
            inv[t][j] = inv[t][j].mul(&piv);
        }
        for i in 0..g {
            if i == t || a[i][t].is_zero() {
                continue;
            }
            let f = a[i][t].clone();
            for j in 0..g {
                let da = f.mul(&a[t][j]);
                let di = f.mul(&inv[t][j]);
                a[i][j] = a[i][j].sub(&da);
                inv[i][j] = inv[i][j].sub(&di);
            }
        }
    }
    Ok(inv)
}

/// Clears denominators (which must be prime to p) and returns exact entries.
fn clear_denominators(p: u64, ctx: RingContext, row: &[QElem]) -> PresResult<Row> {
    let mut l = BigInt::one();
    for e in row {
        for c in &e.0 {
            l = l.lcm(c.denom());
        }
    }
    if (&l % BigInt::from(p)).is_zero() {
        return Err(PresentationError::NonIntegral);
    }
    let lq = BigRational::from_integer(l);
    row.iter()
        .map(|e| {
            let coeffs =
                e.0.iter()
                    .map(|c| {
                        (c * &lq)
                            .to_integer()
                            .to_i128()
                            .ok_or(PresentationError::Ring(RingError::Overflow))
                    })
                    .collect::<PresResult<Vec<_>>>()?;
            Ok(GroupRingElem::new(ctx, &coeffs)?)
        })
        .collect()
}

/// unit·σ^s·(1 - σ) up to sign, with the unit prime to p.
fn is_invariance_entry(p: u64, e: &GroupRingElem) -> bool {
    let nz: Vec<usize> = (0..e.coeffs().len())
        .filter(|&i| e.coeffs()[i] != 0)
        .collect();
    let q = e.coeffs().len();
    if q == 1 || nz.len() != 2 {
        return false;
    }
    let (i, j) = (nz[0], nz[1]);
    let (a, b) = (e.coeffs()[i], e.coeffs()[j]);
    let adjacent = j == i + 1 || (i == 0 && j == q - 1);
    adjacent && a == -b && a % p as i128 != 0
}

/// Transports every relation row along an invertible monomial change of
/// variables. Invariant columns are then normalised to constants, since
/// X^e = X^{e(1)} for an invariant generator X.
pub fn pres_substitute(pres: &Presentation, subst: &Substitution) -> PresResult<Presentation> {
    let g = pres.g();
    if subst.matrix.len() != g
        || subst.matrix.iter().any(|r| r.len() != g)
        || subst.new_names.len() != g
    {
        return Err(PresentationError::Shape(
            "substitution must be g × g".into(),
        ));
    }
    let ctx = pres.ctx();
    let p = ctx.p();
    let q = ctx.order();
    let inv = triangular_inverse(p, &subst.matrix)?;
    let mut transported = Vec::new();
    for row in pres.rows() {
        let r: Vec<QElem> = row.iter().map(QElem::from_exact).collect();
        let new_row: Vec<QElem> = (0..g)
            .map(|j| (0..g).fold(QElem::zero(q), |acc, i| acc.add(&r[i].mul(&inv[i][j]))))
            .collect();
        transported.push(clear_denominators(p, ctx, &new_row)?);
    }
    // rows of the form unit·(1-σ)·e_j mark invariant generators
    let mut invariant = BTreeSet::new();
    let mut rest = Vec::new();
    for row in transported {
        let nz: Vec<usize> = (0..g).filter(|&j| !row[j].is_zero()).collect();
        if nz.len() == 1 && is_invariance_entry(p, &row[nz[0]]) {
            invariant.insert(nz[0]);
        } else if !nz.is_empty() {
            rest.push(row);
        }
    }
    let mut rows = Vec::new();
    for mut row in rest {
        for &j in &invariant {
            let c = row[j].eval_one()?;
            row[j] = GroupRingElem::constant(ctx, c);
        }
        if row.iter().any(|e| !e.is_zero()) && !rows.contains(&row) {
            rows.push(row);
        }
    }
    pres_make(
        ctx,
        subst.new_names.clone(),
        rows,
        invariant.into_iter().collect(),
    )
}

/// Sets generator i to 1 in every row.
pub fn pres_quotient_gen(pres: &Presentation, i: usize) -> PresResult<Presentation> {
    if i >= pres.g() {
        return Err(PresentationError::IndexOutOfRange(i));
    }
    let names: Vec<String> = pres
        .gen_names()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, n)| n.clone())
        .collect();
    let rows: Vec<Row> = pres
        .relations()
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, e)| e.clone())
                .collect::<Row>()
        })
        .filter(|r| r.iter().any(|e| !e.is_zero()))
        .collect();
    let inv: Vec<usize> = pres
        .invariant_gens()
        .iter()
        .filter(|&&j| j != i)
        .map(|&j| if j > i { j - 1 } else { j })
        .collect();
    pres_make(pres.ctx(), names, rows, inv)
}

/// Exponent of a generator in a row, reading invariant generators through
/// their augmentation.
pub fn effective_exponent(pres: &Presentation, row: &Row, i: usize) -> PresResult<GroupRingElem> {
    if pres.invariant_gens().contains(&i) {
        Ok(GroupRingElem::constant(pres.ctx(), row[i].eval_one()?))
    } else {
        Ok(row[i].clone())
    }
}

/// True when the integer c is a p-adic unit.
pub fn is_unit_mod_p(c: i128, p: u64) -> bool {
    c.rem_euclid(p as i128) != 0
}

/// Absolute value helper for exact rationals, used in reports.
pub fn rational_abs(x: &BigRational) -> BigRational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_ring::Special;

    fn ex(p: u64, n: u32) -> RingContext {
        RingContext::exact(p, n).unwrap()
    }

    fn el(ctx: RingContext, c: &[i128]) -> GroupRingElem {
        GroupRingElem::new(ctx, c).unwrap()
    }

    #[test]
    fn make_appends_invariance_rows() {
        let c = ex(2, 1);
        let p = pres_make(c, vec!["X".into()], vec![], vec![0]).unwrap();
        assert_eq!(p.rows().len(), 1);
        assert_eq!(p.rows()[0][0].coeffs(), &[1, -1]);
        assert!(pres_make(c, vec!["X".into(), "X".into()], vec![], vec![]).is_err());
        assert!(pres_make(c, vec!["X".into()], vec![vec![]], vec![]).is_err());
    }

    #[test]
    fn truncate_free_and_trivial() {
        let c = ex(2, 1);
        let free = free_module(c, &["S"]).unwrap();
        let m = pres_truncate(&free, 2).unwrap();
        assert_eq!((m.ambient_rank, m.relation_matrix.rows), (2, 0));
        let triv = pres_make(c, vec!["X".into()], vec![], vec![0]).unwrap();
        let m = pres_truncate(&triv, 2).unwrap();
        assert_eq!(m.relation_matrix.to_rows(), vec![vec![1, 3], vec![3, 1]]);
        assert!(m.check_invariants());
    }

    #[test]
    fn w_1001_has_four_rows() {
        // S^{-σ+3} X^{-2} T^{σ-1}, X invariant, p = 2
        let c = ex(2, 1);
        let row = vec![el(c, &[-2]), el(c, &[3, -1]), el(c, &[-1, 1])];
        let w = pres_make(
            c,
            vec!["X".into(), "S".into(), "T".into()],
            vec![row],
            vec![0],
        )
        .unwrap();
        let m = pres_truncate(&w, 3).unwrap();
        assert_eq!((m.ambient_rank, m.relation_matrix.rows), (6, 4));
        assert!(m.check_invariants());
    }

    #[test]
    fn membership_of_rows_and_zero() {
        let c = ex(3, 1);
        let row = vec![el(c, &[-3]), el(c, &[4, -1]), el(c, &[-1, 1])];
        let w = pres_make(
            c,
            vec!["X".into(), "S".into(), "T".into()],
            vec![row.clone()],
            vec![0],
        )
        .unwrap();
        let v = ElementExpr::from_row(&row);
        let wit = rel_membership_witness(&w, &v, 6).unwrap().unwrap();
        assert!(wit.verify(&w, &v));
        assert!(rel_membership(&w, &ElementExpr::identity(&w), 6).unwrap());
        assert!(!rel_membership(&w, &ElementExpr::generator(&w, 0), 6).unwrap());
        let inv_row = ElementExpr::generator(&w, 0).pow(&el(c, &[1, -1])).unwrap();
        assert!(rel_membership(&w, &inv_row, 6).unwrap());
    }

    #[test]
    fn identity_substitution_keeps_rows() {
        let c = ex(3, 1);
        let row = vec![el(c, &[-3]), el(c, &[4, -1]), el(c, &[-1, 1])];
        let w = pres_make(
            c,
            vec!["X".into(), "S".into(), "T".into()],
            vec![row],
            vec![0],
        )
        .unwrap();
        let same = pres_substitute(&w, &Substitution::identity(&w)).unwrap();
        assert_eq!(same, w);
    }

    #[test]
    fn quotient_of_free_rank_two() {
        let c = ex(2, 2);
        let f = free_module(c, &["A", "B"]).unwrap();
        let q = pres_quotient_gen(&f, 0).unwrap();
        assert_eq!(q.gen_names(), &["B".to_string()]);
        assert!(q.rows().is_empty());
        assert!(pres_quotient_gen(&f, 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = ex(2, 2);
        let n = GroupRingElem::special(c, Special::Norm).unwrap();
        let p = pres_make(
            c,
            vec!["X".into(), "S".into()],
            vec![vec![el(c, &[2]), n]],
            vec![0],
        )
        .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: Presentation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
