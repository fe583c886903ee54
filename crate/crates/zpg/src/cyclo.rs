//! The component fields Q[X]/(P_k) with P_0 = X - 1 and
//! P_k = (X^{p^k} - 1)/(X^{p^{k-1}} - 1) for k >= 1.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

type Poly = Vec<BigRational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentField {
    p: u64,
    k: u32,
    /// monic modulus, lowest degree first
    modulus: Poly,
}

/// Element of a component field, coefficients of a polynomial of degree
/// below deg P_k (lowest first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloElem {
    pub p: u64,
    pub k: u32,
    pub coeffs: Vec<BigRational>,
}

impl CycloElem {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

fn trim(mut a: Poly) -> Poly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let len = a.len().max(b.len());
    let z = BigRational::zero();
    trim(
        (0..len)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Quotient and remainder; b must be nonzero.
fn poly_divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let b = trim(b.clone());
    let mut r = trim(a.clone());
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lead = b[db].clone();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let t = r.last().unwrap() / &lead;
        for (j, c) in b.iter().enumerate() {
            r[shift + j] -= &t * c;
        }
        q[shift] = t;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

impl ComponentField {
    pub fn new(p: u64, k: u32) -> Self {
        let one = BigRational::one();
        let modulus = if k == 0 {
            vec![-one.clone(), one]
        } else {
            let step = p.pow(k - 1) as usize;
            let mut m = vec![BigRational::zero(); step * (p as usize - 1) + 1];
            for j in 0..p as usize {
                m[j * step] = one.clone();
            }
            m
        };
        ComponentField { p, k, modulus }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn wrap(&self, poly: Poly) -> CycloElem {
        let (_, r) = poly_divrem(&poly, &self.modulus);
        let mut coeffs = r;
        coeffs.resize(self.degree(), BigRational::zero());
        CycloElem {
            p: self.p,
            k: self.k,
            coeffs,
        }
    }

    pub fn from_int_poly(&self, coeffs: &[i128]) -> CycloElem {
        let poly = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        self.wrap(trim(poly))
    }

    pub fn zero(&self) -> CycloElem {
        self.wrap(Vec::new())
    }

    pub fn sub(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        self.wrap(poly_sub(&a.coeffs, &b.coeffs))
    }

    pub fn mul(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        self.wrap(poly_mul(&trim(a.coeffs.clone()), &trim(b.coeffs.clone())))
    }

    /// Inverse by the extended Euclidean algorithm; None for zero.
    pub fn inv(&self, a: &CycloElem) -> Option<CycloElem> {
        let a = trim(a.coeffs.clone());
        if a.is_empty() {
            return None;
        }
        // invariant: s·a ≡ r (mod modulus)
        let (mut r0, mut r1) = (self.modulus.clone(), a);
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![BigRational::one()]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s);
        }
        // r0 is a nonzero constant since the modulus is irreducible
        if r0.len() != 1 {
            return None;
        }
        let c = r0[0].clone();
        Some(self.wrap(s0.into_iter().map(|x| x / &c).collect()))
    }

    /// Rank of a matrix over the field by Gaussian elimination.
    pub fn rank(&self, rows: &[Vec<CycloElem>]) -> usize {
        let mut m: Vec<Vec<CycloElem>> = rows.to_vec();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = self.inv(&m[rank][c]).expect("nonzero pivot");
            for i in 0..m.len() {
                if i == rank || m[i][c].is_zero() {
                    continue;
                }
                let f = self.mul(&m[i][c], &inv);
                for j in c..cols {
                    let t = self.mul(&f, &m[rank][j]);
                    m[i][j] = self.sub(&m[i][j], &t);
                }
            }
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        assert_eq!(ComponentField::new(2, 0).degree(), 1);
        assert_eq!(ComponentField::new(2, 1).degree(), 1);
        assert_eq!(ComponentField::new(2, 2).degree(), 2);
        assert_eq!(ComponentField::new(3, 2).degree(), 6);
        assert_eq!(ComponentField::new(5, 1).degree(), 4);
    }

    #[test]
    fn one_minus_x_vanishes_only_at_trivial_component() {
        for k in 0..=2 {
            let f = ComponentField::new(3, k);
            let e = f.from_int_poly(&[1, -1]);
            assert_eq!(e.is_zero(), k == 0);
        }
    }

    #[test]
    fn inverse_times_self_is_one() {
        let f = ComponentField::new(3, 2);
        let a = f.from_int_poly(&[4, -1, 0, 2]);
        let inv = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &inv), f.from_int_poly(&[1]));
    }

    #[test]
    fn rank_small() {
        let f = ComponentField::new(2, 1);
        let r = |c: &[i128]| f.from_int_poly(c);
        // at σ = -1: (1+σ) vanishes
        let rows = vec![vec![r(&[1, 1]), r(&[0])], vec![r(&[2]), r(&[1, -1])]];
        assert_eq!(f.rank(&rows), 1);
    }
}
