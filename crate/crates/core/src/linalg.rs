//! Dense exact matrices over Q with deterministic row reduction.
//!
//! Pivoting rule everywhere: scan columns left to right, take the first
//! row (smallest index) at or below the current pivot row with a nonzero
//! entry. All higher-level choices (homology representatives, homotopies,
//! gauge parameters) inherit their determinism from this rule.

use crate::scalar::Q;
use num_traits::{One, Zero};

pub type Vector = Vec<Q>;

pub fn zero_vec(n: usize) -> Vector {
    vec![Q::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// `acc += c * v`
pub fn axpy(acc: &mut [Q], c: &Q, v: &[Q]) {
    debug_assert_eq!(acc.len(), v.len());
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += c * b;
        }
    }
}

pub fn add_vec(a: &[Q], b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Q], b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(c: &Q, v: &[Q]) -> Vector {
    v.iter().map(|x| c * x).collect()
}

/// Indices and values of the nonzero entries.
pub fn support(v: &[Q]) -> impl Iterator<Item = (usize, &Q)> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vector], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix columns");
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x.clone());
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Q) {
        self.data[i * self.cols + j] = x;
    }

    pub fn add_to(&mut self, i: usize, j: usize, x: &Q) {
        self.data[i * self.cols + j] += x;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|x| !x.is_zero())
            .map(|k| (k / self.cols, k % self.cols))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if !x.is_zero() {
                    t.set(j, i, x.clone());
                }
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let mut out = zero_vec(self.rows);
        for (j, x) in support(v) {
            for i in 0..self.rows {
                let a = self.get(i, j);
                if !a.is_zero() {
                    out[i] += a * x;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: add_vec(&self.data, &other.data),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: sub_vec(&self.data, &other.data),
        }
    }

    pub fn scale(&self, c: &Q) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: scale_vec(c, &self.data),
        }
    }

    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = Q::one() / m.get(r, c).clone();
            for j in c..m.cols {
                let x = &m.data[r * m.cols + j] * &inv;
                m.data[r * m.cols + j] = x;
            }
            let pivot_row: Vec<Q> = m.row(r).to_vec();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    if !pivot_row[j].is_zero() {
                        let x = &f * &pivot_row[j];
                        m.data[i * m.cols + j] -= x;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the null space, one vector per free column, in column order.
    pub fn kernel(&self) -> Vec<Vector> {
        let e = self.echelon();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &e.pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&j| !pivot_set[j]) {
            let mut v = zero_vec(self.cols);
            v[free] = Q::one();
            for (r, &p) in e.pivots.iter().enumerate() {
                let x = e.reduced.get(r, free);
                if !x.is_zero() {
                    v[p] = -x.clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// A solution of `self * x = b` with all free variables set to zero.
    pub fn solve(&self, b: &[Q]) -> Option<Vector> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = zero_vec(self.cols);
        for (r, &p) in e.pivots.iter().enumerate() {
            x[p] = e.reduced.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Q::one());
        }
        let e = aug.echelon();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, e.reduced.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Sub-matrix with the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }
}

/// Greedily selects, in order, the vectors that increase the rank of the
/// span of `seed ∪ selected`. Returns their indices into `candidates`.
pub fn extend_independent(seed: &[Vector], candidates: &[Vector], dim: usize) -> Vec<usize> {
    let mut basis: Vec<(usize, Vector)> = Vec::new(); // (pivot, reduced vector)
    let reduce = |basis: &[(usize, Vector)], v: &[Q]| -> Vector {
        let mut v = v.to_vec();
        for (p, b) in basis {
            if !v[*p].is_zero() {
                let c = v[*p].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
        }
        v
    };
    let push = |basis: &mut Vec<(usize, Vector)>, v: Vector| -> bool {
        let r = reduce(basis, &v);
        match r.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let inv = Q::one() / r[p].clone();
                let r: Vector = r.iter().map(|x| x * &inv).collect();
                for (_, b) in basis.iter_mut() {
                    if !b[p].is_zero() {
                        let c = b[p].clone();
                        for (x, y) in b.iter_mut().zip(&r) {
                            if !y.is_zero() {
                                *x -= &c * y;
                            }
                        }
                    }
                }
                basis.push((p, r));
                true
            }
        }
    };
    for s in seed {
        debug_assert_eq!(s.len(), dim);
        push(&mut basis, s.clone());
    }
    let mut chosen = Vec::new();
    for (k, c) in candidates.iter().enumerate() {
        if push(&mut basis, c.clone()) {
            chosen.push(k);
        }
    }
    chosen
}

/// Coordinates with respect to a fixed family of linearly independent
/// vectors, via a precomputed left inverse on a set of pivot rows.
#[derive(Clone, Debug)]
pub struct CoordinateSystem {
    ambient: usize,
    pivot_rows: Vec<usize>,
    left_inverse: Matrix,
    columns: Matrix,
}

impl CoordinateSystem {
    /// `vectors` must be linearly independent in a space of dimension `ambient`.
    pub fn new(vectors: &[Vector], ambient: usize) -> Self {
        let columns = Matrix::from_cols(vectors, ambient);
        let pivot_rows = columns.transpose().echelon().pivots;
        assert_eq!(pivot_rows.len(), vectors.len(), "vectors are not independent");
        let all: Vec<usize> = (0..vectors.len()).collect();
        let square = columns.select(&pivot_rows, &all);
        let left_inverse = square.inverse().expect("pivot block is invertible");
        CoordinateSystem {
            ambient,
            pivot_rows,
            left_inverse,
            columns,
        }
    }

    pub fn len(&self) -> usize {
        self.pivot_rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivot_rows.is_empty()
    }

    /// Coordinates of `v`, or `None` when `v` is outside the span.
    pub fn coords(&self, v: &[Q]) -> Option<Vector> {
        assert_eq!(v.len(), self.ambient);
        let restricted: Vector = self.pivot_rows.iter().map(|&i| v[i].clone()).collect();
        let c = self.left_inverse.mul_vec(&restricted);
        if self.columns.mul_vec(&c) == v {
            Some(c)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn m(rows: &[&[i64]]) -> Matrix {
        let cols = rows[0].len();
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(),
            cols,
        )
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(is_zero_vec(&a.mul_vec(&k[0])));
    }

    #[test]
    fn solve_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = a.solve(&[q(3), q(1)]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(b.solve(&[q(1), q(3)]).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn coordinates_detect_span() {
        let vs = vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]];
        let cs = CoordinateSystem::new(&vs, 3);
        assert_eq!(cs.coords(&[q(1), q(2), q(1)]).unwrap(), vec![q(1), q(1)]);
        assert!(cs.coords(&[q(1), q(0), q(0)]).is_none());
    }

    #[test]
    fn greedy_extension_skips_dependent() {
        let seed = vec![vec![q(1), q(0), q(0)]];
        let cands = vec![vec![q(2), q(0), q(0)], vec![q(1), q(1), q(0)], vec![q(0), q(1), q(0)]];
        assert_eq!(extend_independent(&seed, &cands, 3), vec![1]);
    }
}
