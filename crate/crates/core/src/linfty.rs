//! L∞-algebras in the shifted convention: every `l_n` has degree −1 and is
//! graded symmetric with respect to the stored degrees.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graded::GradedSpace;
use crate::linalg::{axpy, is_zero_vec, scale_vec, support, zero_vec, Matrix, Vector};
use crate::par::Exec;
use crate::perm::{koszul_odd, multisets, sort_graded, unshuffles};
use crate::scalar::{factorial, format_q, sign, Q};

pub trait LInfinity: Sync {
    fn space(&self) -> &GradedSpace;

    /// Largest `n` with `l_n` possibly nonzero.
    fn max_arity(&self) -> usize;

    /// `l_n` on basis elements, in the given order.
    fn bracket_basis(&self, idx: &[usize]) -> Vector;

    fn dim(&self) -> usize {
        self.space().dim()
    }

    fn degree(&self, i: usize) -> i64 {
        self.space().degree(i)
    }

    /// Multilinear extension of `bracket_basis`.
    fn bracket(&self, args: &[&[Q]]) -> Vector {
        if args.is_empty() || args.len() > self.max_arity() {
            return zero_vec(self.dim());
        }
        multilinear(self.dim(), args, |idx| self.bracket_basis(idx))
    }

    /// `l_1` as a matrix.
    fn ell1(&self) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n).map(|j| self.bracket_basis(&[j])).collect();
        Matrix::from_cols(&cols, n)
    }
}

/// Extends a function on basis tuples multilinearly to vector arguments.
pub fn multilinear(dim: usize, args: &[&[Q]], f: impl Fn(&[usize]) -> Vector) -> Vector {
    let n = args.len();
    let mut out = zero_vec(dim);
    let supports: Vec<Vec<(usize, &Q)>> = args.iter().map(|a| support(a).collect()).collect();
    if supports.iter().any(|s| s.is_empty()) {
        return out;
    }
    let mut idx = vec![0usize; n];
    let mut pos = vec![0usize; n];
    loop {
        let mut coeff = Q::one();
        for k in 0..n {
            let (i, c) = supports[k][pos[k]];
            idx[k] = i;
            coeff *= c;
        }
        let v = f(&idx);
        axpy(&mut out, &coeff, &v);
        // odometer
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < supports[k].len() {
                break;
            }
            pos[k] = 0;
        }
    }
}

/// `l_n(x, …, x)` for a single element.
pub fn bracket_power<L: LInfinity + ?Sized>(l: &L, x: &[Q], n: usize) -> Vector {
    let args: Vec<&[Q]> = vec![x; n];
    l.bracket(&args)
}

/// `Σ_{n≥1} (1/n!) l_n(x, …, x)`.
pub fn mc_residual<L: LInfinity + ?Sized>(l: &L, x: &[Q]) -> Vector {
    let mut out = zero_vec(l.dim());
    for n in 1..=l.max_arity() {
        let v = bracket_power(l, x, n);
        axpy(&mut out, &(Q::one() / factorial(n)), &v);
    }
    out
}

pub fn is_mc<L: LInfinity + ?Sized>(l: &L, x: &[Q]) -> bool {
    is_zero_vec(&mc_residual(l, x))
}

/// The algebra twisted by a Maurer-Cartan element `τ`:
/// `l^τ_k(x₁..x_k) = Σ_{n≥0} (1/n!) l_{k+n}(x₁..x_k, τ, …, τ)`.
pub struct Twisted<'a, L: LInfinity + ?Sized> {
    pub base: &'a L,
    pub tau: Vector,
}

impl<'a, L: LInfinity + ?Sized> Twisted<'a, L> {
    pub fn new(base: &'a L, tau: Vector) -> Self {
        Twisted { base, tau }
    }
}

impl<L: LInfinity + ?Sized> LInfinity for Twisted<'_, L> {
    fn space(&self) -> &GradedSpace {
        self.base.space()
    }

    fn max_arity(&self) -> usize {
        self.base.max_arity()
    }

    fn bracket_basis(&self, idx: &[usize]) -> Vector {
        let k = idx.len();
        let units: Vec<Vector> = idx.iter().map(|&i| crate::linalg::unit_vec(self.dim(), i)).collect();
        let mut out = zero_vec(self.dim());
        for n in 0..=(self.base.max_arity().saturating_sub(k)) {
            let mut args: Vec<&[Q]> = units.iter().map(|u| u.as_slice()).collect();
            for _ in 0..n {
                args.push(&self.tau);
            }
            let v = self.base.bracket(&args);
            axpy(&mut out, &(Q::one() / factorial(n)), &v);
        }
        out
    }
}

/// An L∞-algebra given by explicit structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableLInfinity {
    pub space: GradedSpace,
    pub l1: Matrix,
    /// `l_n` for `n ≥ 2`, keyed by sorted index multisets.
    pub brackets: BTreeMap<Vec<usize>, Vector>,
}

impl TableLInfinity {
    pub fn abelian(space: GradedSpace) -> Self {
        let n = space.dim();
        TableLInfinity {
            space,
            l1: Matrix::zeros(n, n),
            brackets: BTreeMap::new(),
        }
    }

    /// Builds the table from entries `l_n(inputs) = output` given in any
    /// order. Entries are normalized to sorted order with the Koszul sign;
    /// two entries for the same unordered input must agree, and odd inputs
    /// may not repeat. Degrees are checked.
    pub fn new(space: GradedSpace, l1: Matrix, entries: Vec<(Vec<usize>, Vector)>) -> Result<Self> {
        let n = space.dim();
        if l1.rows() != n || l1.cols() != n {
            return Err(Error::Shape(format!("l1 must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if !l1.get(i, j).is_zero() && space.degree(i) != space.degree(j) - 1 {
                    return Err(Error::Degree(format!(
                        "l1 entry [{i}][{j}] does not have degree -1"
                    )));
                }
            }
        }
        let mut brackets: BTreeMap<Vec<usize>, Vector> = BTreeMap::new();
        for (inputs, output) in entries {
            if inputs.len() < 2 {
                return Err(Error::Shape("bracket entries need arity at least 2".into()));
            }
            if output.len() != n {
                return Err(Error::Shape("bracket output has wrong length".into()));
            }
            let names: Vec<&str> = inputs.iter().map(|&i| space.name(i)).collect();
            let total: i64 = inputs.iter().map(|&i| space.degree(i)).sum();
            if let Some(d) = space.vector_degree(&output) {
                if d != total - 1 {
                    return Err(Error::Degree(format!(
                        "l{}({}) lands in degree {d}, expected {}",
                        inputs.len(),
                        names.join(","),
                        total - 1
                    )));
                }
            } else if !is_zero_vec(&output) {
                return Err(Error::Degree(format!(
                    "l{}({}) is not homogeneous",
                    inputs.len(),
                    names.join(",")
                )));
            }
            let Some((sorted, odd)) = sort_graded(&inputs, |i| space.degree(i)) else {
                if is_zero_vec(&output) {
                    continue;
                }
                return Err(Error::validation(
                    "graded symmetry",
                    format!("l{}({}) repeats an odd element but is nonzero", inputs.len(), names.join(",")),
                ));
            };
            let value = scale_vec(&sign(odd), &output);
            match brackets.get(&sorted) {
                Some(prev) if *prev != value => {
                    return Err(Error::validation(
                        "graded symmetry",
                        format!(
                            "l{}({}) is specified inconsistently with another ordering of its inputs",
                            inputs.len(),
                            names.join(",")
                        ),
                    ));
                }
                _ => {
                    brackets.insert(sorted, value);
                }
            }
        }
        brackets.retain(|_, v| !is_zero_vec(v));
        Ok(TableLInfinity { space, l1, brackets })
    }

    /// Rational homotopy of `S²` in the shifted convention: `x` (2), `y` (3),
    /// `l_2(x, x) = y`.
    pub fn s2() -> Self {
        let space = GradedSpace::from_pairs(&[("x", 2), ("y", 3)]);
        let mut y = zero_vec(2);
        y[1] = Q::one();
        TableLInfinity::new(space, Matrix::zeros(2, 2), vec![(vec![0, 0], y)]).expect("valid table")
    }

    /// Rational homotopy of an odd sphere `S^n`: one generator `z` (n), abelian.
    pub fn odd_sphere(n: i64) -> Self {
        Self::abelian(GradedSpace::from_pairs(&[("z", n)]))
    }

    /// Tabulates any L∞-algebra up to the given arity.
    pub fn tabulate<L: LInfinity + ?Sized>(l: &L, max_arity: usize, exec: Exec) -> Self {
        let space = l.space().clone();
        let n = space.dim();
        let mut keys = Vec::new();
        for k in 2..=max_arity.min(l.max_arity()) {
            for m in multisets(n, k) {
                if sort_graded(&m, |i| space.degree(i)).is_some() {
                    keys.push(m);
                }
            }
        }
        let values = exec.map(&keys, |m| l.bracket_basis(m));
        let brackets = keys
            .into_iter()
            .zip(values)
            .filter(|(_, v)| !is_zero_vec(v))
            .collect();
        TableLInfinity {
            l1: l.ell1(),
            space,
            brackets,
        }
    }

    pub fn is_strict_lie(&self) -> bool {
        self.brackets.keys().all(|k| k.len() == 2)
    }
}

impl LInfinity for TableLInfinity {
    fn space(&self) -> &GradedSpace {
        &self.space
    }

    fn max_arity(&self) -> usize {
        self.brackets.keys().map(|k| k.len()).max().unwrap_or(1)
    }

    fn bracket_basis(&self, idx: &[usize]) -> Vector {
        match idx.len() {
            0 => zero_vec(self.dim()),
            1 => self.l1.col(idx[0]),
            _ => match sort_graded(idx, |i| self.space.degree(i)) {
                None => zero_vec(self.dim()),
                Some((sorted, odd)) => match self.brackets.get(&sorted) {
                    None => zero_vec(self.dim()),
                    Some(v) => scale_vec(&sign(odd), v),
                },
            },
        }
    }
}

/// Generalized Jacobi expression on basis inputs:
/// `Σ_{i+j=n+1} Σ_{unshuffles} ε l_j(l_i(x_B), x_rest)`.
pub fn jacobi_residual<L: LInfinity + ?Sized>(l: &L, idx: &[usize]) -> Vector {
    let n = idx.len();
    let degrees: Vec<i64> = idx.iter().map(|&i| l.degree(i)).collect();
    let dim = l.dim();
    let mut out = zero_vec(dim);
    for i in 1..=n.min(l.max_arity()) {
        let j = n - i + 1;
        if j > l.max_arity() {
            continue;
        }
        for (block, rest) in unshuffles(n, i) {
            let order: Vec<usize> = block.iter().chain(rest.iter()).copied().collect();
            let eps = sign(koszul_odd(&degrees, &order));
            let inner_idx: Vec<usize> = block.iter().map(|&k| idx[k]).collect();
            let inner = l.bracket_basis(&inner_idx);
            if is_zero_vec(&inner) {
                continue;
            }
            let rest_units: Vec<Vector> = rest
                .iter()
                .map(|&k| crate::linalg::unit_vec(dim, idx[k]))
                .collect();
            let mut args: Vec<&[Q]> = vec![&inner];
            args.extend(rest_units.iter().map(|u| u.as_slice()));
            let v = l.bracket(&args);
            axpy(&mut out, &eps, &v);
        }
    }
    out
}

/// Checks the generalized Jacobi identities on every basis multiset of
/// size at most `max_arity`. Reports the first nonzero residual.
pub fn validate_linfty<L: LInfinity + ?Sized>(l: &L, max_arity: usize, exec: Exec) -> Result<()> {
    let space = l.space();
    for n in 1..=max_arity {
        let tuples: Vec<Vec<usize>> = multisets(space.dim(), n)
            .into_iter()
            .filter(|m| sort_graded(m, |i| space.degree(i)).is_some())
            .collect();
        let failure = exec.find_first(&tuples, |m| {
            let r = jacobi_residual(l, m);
            if is_zero_vec(&r) {
                None
            } else {
                Some((m.clone(), r))
            }
        });
        if let Some((m, r)) = failure {
            let names: Vec<&str> = m.iter().map(|&i| space.name(i)).collect();
            return Err(Error::validation(
                format!("generalized Jacobi, arity {n}"),
                format!("inputs ({}) give residual {}", names.join(","), space.describe(&r)),
            ));
        }
    }
    Ok(())
}

/// Checks that a degree-0 linear map commutes with all brackets:
/// `f l_n(x₁..x_n) = l'_n(f x₁, …, f x_n)` on basis inputs.
pub fn check_strict_morphism<L: LInfinity + ?Sized, M: LInfinity + ?Sized>(
    f: &Matrix,
    source: &L,
    target: &M,
    max_arity: usize,
) -> Result<()> {
    let space = source.space();
    if f.rows() != target.dim() || f.cols() != source.dim() {
        return Err(Error::Shape("morphism matrix has wrong shape".into()));
    }
    for i in 0..f.rows() {
        for j in 0..f.cols() {
            if !f.get(i, j).is_zero() && target.degree(i) != source.degree(j) {
                return Err(Error::Degree(format!("morphism entry [{i}][{j}] is not of degree 0")));
            }
        }
    }
    let cols: Vec<Vector> = (0..source.dim()).map(|j| f.col(j)).collect();
    for n in 1..=max_arity {
        for m in multisets(space.dim(), n) {
            if sort_graded(&m, |i| space.degree(i)).is_none() {
                continue;
            }
            let lhs = f.mul_vec(&source.bracket_basis(&m));
            let args: Vec<&[Q]> = m.iter().map(|&i| cols[i].as_slice()).collect();
            let rhs = target.bracket(&args);
            if lhs != rhs {
                let names: Vec<&str> = m.iter().map(|&i| space.name(i)).collect();
                return Err(Error::InvalidMorphism(format!(
                    "does not commute with l{n} on ({})",
                    names.join(",")
                )));
            }
        }
    }
    Ok(())
}

/// Renders a coefficient vector as a list of `(name, "p/q")` pairs.
pub fn named_terms(space: &GradedSpace, v: &[Q]) -> Vec<(String, String)> {
    support(v)
        .map(|(i, x)| (space.name(i).to_string(), format_q(x)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    pub fn s2_model() -> TableLInfinity {
        let space = GradedSpace::from_pairs(&[("x", 2), ("y", 3)]);
        TableLInfinity::new(space, Matrix::zeros(2, 2), vec![(vec![0, 0], vec![q(0), q(1)])]).unwrap()
    }

    #[test]
    fn s2_model_is_valid() {
        validate_linfty(&s2_model(), 4, Exec::Sequential).unwrap();
    }

    #[test]
    fn symmetry_precheck_rejects_inconsistent_entries() {
        let space = GradedSpace::from_pairs(&[("a", 3), ("b", 3), ("c", 5)]);
        let entries = vec![
            (vec![0, 1], vec![q(0), q(0), q(1)]),
            (vec![1, 0], vec![q(0), q(0), q(1)]),
        ];
        let err = TableLInfinity::new(space, Matrix::zeros(3, 3), entries).unwrap_err();
        assert!(matches!(err, Error::Validation { ref identity, .. } if identity == "graded symmetry"));
    }

    #[test]
    fn jacobi_failure_is_reported() {
        // l2(x,x) = y, l2(x,y) = z with x even: l2(l2(x,x),x) ≠ 0
        let space = GradedSpace::from_pairs(&[("x", 2), ("y", 3), ("z", 4)]);
        let entries = vec![
            (vec![0, 0], vec![q(0), q(1), q(0)]),
            (vec![0, 1], vec![q(0), q(0), q(1)]),
        ];
        let l = TableLInfinity::new(space, Matrix::zeros(3, 3), entries).unwrap();
        assert!(validate_linfty(&l, 3, Exec::Sequential).is_err());
    }

    #[test]
    fn mc_residual_of_scaled_generator() {
        let l = s2_model();
        // l2(x,x)/2 = y/2
        let r = mc_residual(&l, &[q(1), q(0)]);
        assert_eq!(r, vec![q(0), crate::scalar::q_frac(1, 2)]);
    }
}
