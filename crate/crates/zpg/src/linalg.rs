//! Dense matrices over Z/p^K and a Smith normal form that pivots on the entry
//! of least p-valuation (ties broken by row-major position).

use serde::{Deserialize, Serialize};

/// The ring Z/p^K with p^K < 2^62.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zpk {
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
}

impl Zpk {
    pub fn new(p: u64, k: u32) -> Option<Self> {
        let m = p.checked_pow(k)?;
        (k >= 1 && m < (1 << 62)).then_some(Zpk { p, k, modulus: m })
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b) % self.modulus
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// Valuation of x, with K for zero.
    pub fn val(&self, x: u64) -> u32 {
        if x == 0 {
            return self.k;
        }
        let mut x = x;
        let mut v = 0;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn pow_p(&self, e: u32) -> u64 {
        if e >= self.k {
            0
        } else {
            self.p.pow(e)
        }
    }

    /// Inverse of a unit.
    pub fn inv(&self, u: u64) -> u64 {
        crate::group_ring::mod_inverse(u as i128, self.modulus as i128).expect("unit") as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn scale_row(&mut self, r: &Zpk, i: usize, f: u64) {
        for j in 0..self.cols {
            let x = self.get(i, j);
            self.set(i, j, r.mul(x, f));
        }
    }

    /// row_i -= f · row_src
    pub fn sub_row(&mut self, r: &Zpk, i: usize, src: usize, f: u64) {
        if f == 0 {
            return;
        }
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s != 0 {
                let x = self.get(i, j);
                self.set(i, j, r.sub(x, r.mul(f, s)));
            }
        }
    }

    /// col_j -= f · col_src
    pub fn sub_col(&mut self, r: &Zpk, j: usize, src: usize, f: u64) {
        if f == 0 {
            return;
        }
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s != 0 {
                let x = self.get(i, j);
                self.set(i, j, r.sub(x, r.mul(f, s)));
            }
        }
    }

    pub fn mul(&self, r: &Zpk, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(t, j);
                    if b != 0 {
                        let x = out.get(i, j);
                        out.set(i, j, r.add(x, r.mul(a, b)));
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, r: &Zpk, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0u64; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for j in 0..self.cols {
                let b = self.get(i, j);
                if b != 0 {
                    out[j] = r.add(out[j], r.mul(a, b));
                }
            }
        }
        out
    }

    /// Stacks rows of `other` under `self`.
    pub fn stack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }
}

/// Elementary divisors of a cokernel over Z/p^K.
///
/// `exponents` lists e with the cokernel ≅ ⊕ Z/p^e: one entry per pivot of
/// positive valuation, plus K for each column without a pivot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnfResult {
    pub precision: u32,
    /// valuations of the Smith diagonal, one per pivot, nondecreasing
    pub valuations: Vec<u32>,
    pub exponents: Vec<u32>,
}

impl SnfResult {
    /// log_p of the cokernel order.
    pub fn log_order(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn free_count(&self) -> usize {
        self.exponents
            .iter()
            .filter(|&&e| e == self.precision)
            .count()
    }

    pub fn torsion(&self) -> Vec<u32> {
        self.exponents
            .iter()
            .copied()
            .filter(|&e| e < self.precision)
            .collect()
    }
}

/// U·A·V = diag(p^{v_0}, p^{v_1}, ...), with U and V invertible.
pub struct SnfTransforms {
    pub valuations: Vec<u32>,
    pub u: Mat,
    pub v: Mat,
}

fn find_pivot(r: &Zpk, a: &Mat, t: usize) -> Option<(usize, usize, u32)> {
    let mut best: Option<(usize, usize, u32)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = a.get(i, j);
            if x == 0 {
                continue;
            }
            let v = r.val(x);
            if best.is_none_or(|b| v < b.2) {
                best = Some((i, j, v));
                if v == 0 {
                    return best;
                }
            }
        }
    }
    best
}

fn diagonalize(r: &Zpk, a: &mut Mat, mut u: Option<&mut Mat>, mut v: Option<&mut Mat>) -> Vec<u32> {
    let mut vals = Vec::new();
    let steps = a.rows.min(a.cols);
    for t in 0..steps {
        let Some((i, j, val)) = find_pivot(r, a, t) else {
            break;
        };
        a.swap_rows(t, i);
        a.swap_cols(t, j);
        if let Some(u) = u.as_deref_mut() {
            u.swap_rows(t, i);
        }
        if let Some(v) = v.as_deref_mut() {
            v.swap_cols(t, j);
        }
        let pv = r.p.pow(val);
        let unit = a.get(t, t) / pv;
        let inv = r.inv(unit % r.modulus);
        a.scale_row(r, t, inv);
        if let Some(u) = u.as_deref_mut() {
            u.scale_row(r, t, inv);
        }
        debug_assert_eq!(a.get(t, t), pv % r.modulus);
        for i in t + 1..a.rows {
            let x = a.get(i, t);
            if x == 0 {
                continue;
            }
            let f = x / pv;
            a.sub_row(r, i, t, f);
            if let Some(u) = u.as_deref_mut() {
                u.sub_row(r, i, t, f);
            }
        }
        for j in t + 1..a.cols {
            let x = a.get(t, j);
            if x == 0 {
                continue;
            }
            let f = x / pv;
            a.set(t, j, 0);
            if let Some(v) = v.as_deref_mut() {
                v.sub_col(r, j, t, f);
            }
        }
        vals.push(val);
    }
    vals
}

fn result_from(r: &Zpk, cols: usize, vals: Vec<u32>) -> SnfResult {
    let mut exponents: Vec<u32> = vals.iter().copied().filter(|&v| v > 0).collect();
    exponents.extend(std::iter::repeat_n(r.k, cols - vals.len()));
    exponents.sort_unstable();
    SnfResult {
        precision: r.k,
        valuations: vals,
        exponents,
    }
}

/// Cokernel exponents of the row space of `a` inside (Z/p^K)^cols.
pub fn snf(r: &Zpk, a: &Mat) -> SnfResult {
    let mut work = a.clone();
    let vals = diagonalize(r, &mut work, None, None);
    result_from(r, a.cols, vals)
}

pub fn snf_with_transforms(r: &Zpk, a: &Mat) -> SnfTransforms {
    let mut work = a.clone();
    let mut u = Mat::identity(a.rows);
    let mut v = Mat::identity(a.cols);
    let valuations = diagonalize(r, &mut work, Some(&mut u), Some(&mut v));
    SnfTransforms { valuations, u, v }
}

/// Row-space solver over Z/p^K built from one Smith decomposition.
pub struct RowSolver {
    ring: Zpk,
    t: SnfTransforms,
}

impl RowSolver {
    pub fn new(ring: Zpk, a: &Mat) -> Self {
        RowSolver {
            ring,
            t: snf_with_transforms(&ring, a),
        }
    }

    pub fn rank(&self) -> usize {
        self.t.valuations.len()
    }

    pub fn valuations(&self) -> &[u32] {
        &self.t.valuations
    }

    /// Some(x) with x·A = b, or None when b is not in the row space.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let r = &self.ring;
        let w = self.t.v.vec_mul(r, b);
        let rank = self.rank();
        if w[rank..].iter().any(|&x| x != 0) {
            return None;
        }
        let mut y = vec![0u64; self.t.u.rows];
        for (i, &v) in self.t.valuations.iter().enumerate() {
            if r.val(w[i]) < v {
                return None;
            }
            y[i] = if w[i] == 0 { 0 } else { w[i] / r.p.pow(v) };
        }
        Some(self.t.u.vec_mul(r, &y))
    }

    /// Least e with p^e·b in the row space; None when no e < K works.
    pub fn order_exponent(&self, b: &[u64]) -> Option<u32> {
        let r = &self.ring;
        let w = self.t.v.vec_mul(r, b);
        let mut e = 0;
        for (i, &x) in w.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let need = match self.t.valuations.get(i) {
                Some(&v) => v.saturating_sub(r.val(x)),
                None => r.k - r.val(x),
            };
            e = e.max(need);
        }
        (e < r.k).then_some(e)
    }

    /// Rows of U beyond the rank: a basis of the left kernel, exact over Z_p
    /// whenever every nonzero invariant factor has valuation below K.
    pub fn left_kernel(&self) -> Vec<Vec<u64>> {
        (self.rank()..self.t.u.rows)
            .map(|i| self.t.u.row(i).to_vec())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_example() {
        let r = Zpk::new(2, 4).unwrap();
        let a = Mat::from_rows(2, &[vec![2, 0], vec![0, 4]]);
        let s = snf(&r, &a);
        assert_eq!(s.valuations, vec![1, 2]);
        assert_eq!(s.exponents, vec![1, 2]);
    }

    #[test]
    fn zero_matrix_is_free() {
        let r = Zpk::new(3, 5).unwrap();
        let s = snf(&r, &Mat::zeros(2, 3));
        assert_eq!(s.exponents, vec![5, 5, 5]);
        assert_eq!(s.free_count(), 3);
    }

    #[test]
    fn trivial_action_rows() {
        let r = Zpk::new(2, 6).unwrap();
        let m = r.modulus;
        let a = Mat::from_rows(2, &[vec![1, m - 1], vec![m - 1, 1]]);
        let s = snf(&r, &a);
        assert_eq!(s.exponents, vec![6]);
    }

    #[test]
    fn transforms_reproduce_diagonal() {
        let r = Zpk::new(3, 4).unwrap();
        let a = Mat::from_rows(3, &[vec![3, 6, 9], vec![1, 2, 4], vec![9, 0, 27]]);
        let t = snf_with_transforms(&r, &a);
        let d = t.u.mul(&r, &a).mul(&r, &t.v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j && i < t.valuations.len() {
                    r.pow_p(t.valuations[i])
                } else {
                    0
                };
                assert_eq!(d.get(i, j), want, "entry {i},{j}");
            }
        }
    }

    #[test]
    fn solver_membership() {
        let r = Zpk::new(2, 5).unwrap();
        let a = Mat::from_rows(2, &[vec![4, 2]]);
        let s = RowSolver::new(r, &a);
        let x = s.solve(&[12, 6]).unwrap();
        assert_eq!(Mat::from_rows(1, &[x]).mul(&r, &a).row(0), &[12, 6]);
        assert!(s.solve(&[2, 1]).is_none());
        assert_eq!(s.order_exponent(&[2, 1]), Some(1));
        assert_eq!(s.order_exponent(&[1, 0]), None);
    }
}
