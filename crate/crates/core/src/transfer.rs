//! Homotopy transfer of L∞-structures along a contraction, the extending
//! ∞-morphism, and pushforward of Maurer-Cartan elements.
//!
//! With `S_n = Σ_{k≥2} l_k(F_{B_1}, …, F_{B_k}) − Σ_{2≤i<n} F_{n−i+1}(l′_i(x_B), x_rest)`
//! (sums over set partitions and unshuffles, Koszul signs), the transferred
//! brackets are `l′_n = p S_n` and the ∞-morphism is `F_1 = i`,
//! `F_n = −h S_n`. Unrolling the recursion gives the usual sum over rooted
//! trees with leaves `i`, internal edges `h` and root `p`.

use std::collections::BTreeMap;

use num_traits::One;

use crate::coalgebra::CdgCoalgebra;
use crate::complex::Contraction;
use crate::error::{Error, Result};
use crate::graded::GradedSpace;
use crate::linalg::{axpy, is_zero_vec, scale_vec, support, zero_vec, Matrix, Vector};
use crate::linfty::{multilinear, LInfinity, TableLInfinity};
use crate::mc_gauge::GaugePath;
use crate::par::Exec;
use crate::perm::{koszul_odd, multisets, set_partitions, sort_graded, unshuffles};
use crate::scalar::{factorial, sign, Q};

/// Anything that evaluates like the components of an ∞-morphism.
pub trait InfinityMap: Sync {
    fn source_space(&self) -> &GradedSpace;
    fn target_dim(&self) -> usize;
    fn arity(&self) -> usize;
    /// `F_n` on basis elements in the given order.
    fn eval_basis(&self, idx: &[usize]) -> Vector;

    fn eval(&self, args: &[&[Q]]) -> Vector {
        if args.is_empty() || args.len() > self.arity() {
            return zero_vec(self.target_dim());
        }
        multilinear(self.target_dim(), args, |idx| self.eval_basis(idx))
    }
}

/// An ∞-morphism given by tables of its components on sorted multisets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinityMorphism {
    pub source: GradedSpace,
    pub target: GradedSpace,
    /// `components[n]` holds `F_n`; index 0 is unused.
    pub components: Vec<BTreeMap<Vec<usize>, Vector>>,
}

impl InfinityMorphism {
    /// The strict morphism with `F_1 = f`.
    pub fn strict(source: GradedSpace, target: GradedSpace, f: &Matrix) -> Self {
        let mut first = BTreeMap::new();
        for j in 0..source.dim() {
            let v = f.col(j);
            if !is_zero_vec(&v) {
                first.insert(vec![j], v);
            }
        }
        InfinityMorphism {
            source,
            target,
            components: vec![BTreeMap::new(), first],
        }
    }

    pub fn first(&self) -> Matrix {
        let cols: Vec<Vector> = (0..self.source.dim()).map(|j| self.eval_basis(&[j])).collect();
        Matrix::from_cols(&cols, self.target.dim())
    }

    /// True when every component of arity at least 2 vanishes.
    pub fn is_strict(&self) -> bool {
        self.components.iter().skip(2).all(|c| c.is_empty())
    }
}

impl InfinityMap for InfinityMorphism {
    fn source_space(&self) -> &GradedSpace {
        &self.source
    }

    fn target_dim(&self) -> usize {
        self.target.dim()
    }

    fn arity(&self) -> usize {
        self.components.len().saturating_sub(1)
    }

    fn eval_basis(&self, idx: &[usize]) -> Vector {
        let n = idx.len();
        let Some(table) = self.components.get(n) else {
            return zero_vec(self.target.dim());
        };
        match sort_graded(idx, |i| self.source.degree(i)) {
            None => zero_vec(self.target.dim()),
            Some((sorted, odd)) => match table.get(&sorted) {
                None => zero_vec(self.target.dim()),
                Some(v) => scale_vec(&sign(odd), v),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct Transferred {
    pub algebra: TableLInfinity,
    /// The ∞-quasi-isomorphism `i′` from the small space to the big one.
    pub inclusion: InfinityMorphism,
    pub arity: usize,
}

/// Evaluates `l_k(F_{B_1}(x_{B_1}), …, F_{B_k}(x_{B_k}))` summed over set
/// partitions into at least `min_blocks` blocks, with Koszul signs.
fn partition_sum<L: LInfinity + ?Sized, F: InfinityMap + ?Sized>(
    w: &L,
    f: &F,
    idx: &[usize],
    min_blocks: usize,
) -> Vector {
    let n = idx.len();
    let degrees: Vec<i64> = idx.iter().map(|&i| f.source_space().degree(i)).collect();
    let mut out = zero_vec(w.dim());
    for k in min_blocks..=n.min(w.max_arity()) {
        for blocks in set_partitions(n, k) {
            let order: Vec<usize> = blocks.iter().flatten().copied().collect();
            let eps = sign(koszul_odd(&degrees, &order));
            let values: Vec<Vector> = blocks
                .iter()
                .map(|b| f.eval_basis(&b.iter().map(|&p| idx[p]).collect::<Vec<_>>()))
                .collect();
            if values.iter().any(|v| is_zero_vec(v)) {
                continue;
            }
            let args: Vec<&[Q]> = values.iter().map(|v| v.as_slice()).collect();
            let v = w.bracket(&args);
            axpy(&mut out, &eps, &v);
        }
    }
    out
}

/// Evaluates `F_{n−i+1}(l′_i(x_B), x_rest)` summed over unshuffles with
/// `lo ≤ |B| ≤ hi`.
fn unshuffle_sum<V: LInfinity + ?Sized, F: InfinityMap + ?Sized>(
    v: &V,
    f: &F,
    idx: &[usize],
    lo: usize,
    hi: usize,
) -> Vector {
    let n = idx.len();
    let degrees: Vec<i64> = idx.iter().map(|&i| v.degree(i)).collect();
    let mut out = zero_vec(f.target_dim());
    for i in lo..=hi.min(n) {
        for (block, rest) in unshuffles(n, i) {
            let order: Vec<usize> = block.iter().chain(rest.iter()).copied().collect();
            let eps = sign(koszul_odd(&degrees, &order));
            let inner: Vec<usize> = block.iter().map(|&p| idx[p]).collect();
            let b = v.bracket_basis(&inner);
            for (x, c) in support(&b) {
                let mut args = vec![x];
                args.extend(rest.iter().map(|&p| idx[p]));
                let val = f.eval_basis(&args);
                axpy(&mut out, &(&eps * c), &val);
            }
        }
    }
    out
}

/// Largest arity at which transferred brackets (landing in degrees up to
/// `small_top`) or morphism components (landing up to `big_top`) can be
/// nonzero, given that the small space starts in degree `lo ≥ 2`.
fn degree_arity_bound(space: &GradedSpace, big_top: Option<i64>, cap: usize) -> usize {
    match space.degree_range() {
        Some((lo, hi)) if lo >= 2 => {
            // n inputs have total degree ≥ n·lo; brackets subtract one
            let top = hi.max(big_top.unwrap_or(hi) + 1);
            let mut n = 1;
            while (n as i64 + 1) * lo - 1 <= top && n < cap {
                n += 1;
            }
            n
        }
        Some(_) => cap,
        None => 1,
    }
}

/// Transfers the structure of `w` to the small complex of `k`, through the
/// given arity (lowered automatically when degrees force vanishing).
pub fn transfer_linfty<L: LInfinity + ?Sized>(
    w: &L,
    k: &Contraction,
    max_arity: usize,
    exec: Exec,
) -> Result<Transferred> {
    if w.space() != &k.big.space {
        return Err(Error::Shape("contraction does not start at the given algebra".into()));
    }
    if w.ell1() != k.big.d {
        return Err(Error::Shape("contraction differential differs from l1".into()));
    }
    k.check()?;
    let vs = k.small.space.clone();
    let arity = degree_arity_bound(&vs, k.big.space.degree_range().map(|r| r.1), max_arity.max(1));
    let mut brackets: BTreeMap<Vec<usize>, Vector> = BTreeMap::new();
    let mut morph = InfinityMorphism::strict(vs.clone(), k.big.space.clone(), &k.i);
    for n in 2..=arity {
        let keys: Vec<Vec<usize>> = multisets(vs.dim(), n)
            .into_iter()
            .filter(|m| sort_graded(m, |i| vs.degree(i)).is_some())
            .collect();
        let partial = TableLInfinity {
            space: vs.clone(),
            l1: k.small.d.clone(),
            brackets: brackets.clone(),
        };
        let results = exec.map(&keys, |m| {
            let mut s = partition_sum(w, &morph, m, 2);
            let mid = unshuffle_sum(&partial, &morph, m, 2, n - 1);
            axpy(&mut s, &-Q::one(), &mid);
            let ln = k.p.mul_vec(&s);
            let fneg = k.h.mul_vec(&s);
            (ln, scale_vec(&-Q::one(), &fneg))
        });
        let mut table = BTreeMap::new();
        for (m, (ln, fn_)) in keys.into_iter().zip(results) {
            if !is_zero_vec(&ln) {
                brackets.insert(m.clone(), ln);
            }
            if !is_zero_vec(&fn_) {
                table.insert(m, fn_);
            }
        }
        morph.components.push(table);
    }
    let algebra = TableLInfinity {
        space: vs,
        l1: k.small.d.clone(),
        brackets,
    };
    Ok(Transferred {
        algebra,
        inclusion: morph,
        arity,
    })
}

/// The ∞-morphism identity on basis inputs:
/// `Σ_{k≥1} l_k(F_{B_1}, …, F_{B_k}) − Σ_{i≥1} F_{n−i+1}(l′_i(x_B), x_rest)`.
pub fn morphism_residual<V: LInfinity + ?Sized, W: LInfinity + ?Sized, F: InfinityMap + ?Sized>(
    f: &F,
    source: &V,
    target: &W,
    idx: &[usize],
) -> Vector {
    let mut r = partition_sum(target, f, idx, 1);
    let rhs = unshuffle_sum(source, f, idx, 1, idx.len());
    axpy(&mut r, &-Q::one(), &rhs);
    r
}

/// Checks the ∞-morphism identities on all basis multisets through `max_arity`.
pub fn check_infinity_morphism<V: LInfinity + ?Sized, W: LInfinity + ?Sized, F: InfinityMap + ?Sized>(
    f: &F,
    source: &V,
    target: &W,
    max_arity: usize,
    exec: Exec,
) -> Result<()> {
    let space = source.space();
    for n in 1..=max_arity {
        let keys: Vec<Vec<usize>> = multisets(space.dim(), n)
            .into_iter()
            .filter(|m| sort_graded(m, |i| space.degree(i)).is_some())
            .collect();
        let bad = exec.find_first(&keys, |m| {
            let r = morphism_residual(f, source, target, m);
            (!is_zero_vec(&r)).then(|| m.clone())
        });
        if let Some(m) = bad {
            let names: Vec<&str> = m.iter().map(|&i| space.name(i)).collect();
            return Err(Error::validation(
                format!("infinity-morphism coherence, arity {n}"),
                format!("nonzero residual on ({})", names.join(",")),
            ));
        }
    }
    Ok(())
}

/// `Σ_{n≥1} (1/n!) F_n(τ, …, τ)`, after checking that `τ` is MC.
pub fn push_mc<V: LInfinity + ?Sized, W: LInfinity + ?Sized, F: InfinityMap + ?Sized>(
    f: &F,
    source: &V,
    target: &W,
    tau: &[Q],
) -> Result<Vector> {
    if !crate::linfty::is_mc(source, tau) {
        return Err(Error::NotMaurerCartan("pushed element is not MC".into()));
    }
    let mut out = zero_vec(f.target_dim());
    for n in 1..=f.arity() {
        let args: Vec<&[Q]> = vec![tau; n];
        let v = f.eval(&args);
        axpy(&mut out, &(Q::one() / factorial(n)), &v);
    }
    if !crate::linfty::is_mc(target, &out) {
        return Err(Error::validation("push_mc", "image is not MC"));
    }
    Ok(out)
}

/// Transports a path `X(t) + dt·Λ(t)` along an ∞-morphism: the image has
/// `X ↦ Σ (1/n!) F_n(X^n)` and `Λ ↦ Σ (1/(n−1)!) F_n(Λ, X^{n−1})`.
pub fn push_path<F: InfinityMap + ?Sized>(f: &F, path: &GaugePath) -> GaugePath {
    let dim = f.target_dim();
    let a = f.arity();
    let dx = path.x.len().saturating_sub(1);
    let top = dx * a + path.lambda.len();
    let mut x = vec![zero_vec(dim); dx * a + 1];
    let mut lambda = vec![zero_vec(dim); top + 1];
    // expand over ordered tuples of coefficient powers
    for n in 1..=a {
        let w = Q::one() / factorial(n);
        for tuple in tuples(path.x.len(), n) {
            let args: Vec<&[Q]> = tuple.iter().map(|&k| path.x[k].as_slice()).collect();
            let v = f.eval(&args);
            axpy(&mut x[tuple.iter().sum::<usize>()], &w, &v);
        }
        let w = Q::one() / factorial(n - 1);
        for (j, lam) in path.lambda.iter().enumerate() {
            for tuple in tuples(path.x.len(), n - 1) {
                let mut args: Vec<&[Q]> = vec![lam.as_slice()];
                args.extend(tuple.iter().map(|&k| path.x[k].as_slice()));
                let v = f.eval(&args);
                axpy(&mut lambda[j + tuple.iter().sum::<usize>()], &w, &v);
            }
        }
    }
    while x.len() > 1 && is_zero_vec(x.last().unwrap()) {
        x.pop();
    }
    while lambda.last().is_some_and(|v| is_zero_vec(v)) {
        lambda.pop();
    }
    GaugePath { x, lambda }
}

fn tuples(base: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..base).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

/// The ∞-morphism `Hom(C, V) → Hom(C, W)` induced by `F: V → W`:
/// `F_n(f_1, …, f_n) = F_n ∘ (f_1⊗…⊗f_n) ∘ Δ^{(n)}`.
pub struct LiftedMorphism<'a, F: InfinityMap + ?Sized> {
    pub inner: &'a F,
    pub coalgebra: &'a CdgCoalgebra,
    space: GradedSpace,
    target_dim: usize,
    iterated: Vec<Vec<Vec<(Vec<usize>, Q)>>>,
}

impl<'a, F: InfinityMap + ?Sized> LiftedMorphism<'a, F> {
    /// `source` and `target` are the carriers of `Hom(C, V)` and `Hom(C, W)`.
    pub fn new(inner: &'a F, coalgebra: &'a CdgCoalgebra, source: &GradedSpace, target_dim: usize) -> Self {
        let arity = inner.arity().min(coalgebra.top_arity()).max(1);
        let mut iterated = vec![Vec::new(); arity + 1];
        for (n, slot) in iterated.iter_mut().enumerate().skip(1) {
            *slot = (0..coalgebra.dim())
                .map(|c| coalgebra.iterated(c, n).into_iter().collect())
                .collect();
        }
        LiftedMorphism {
            inner,
            coalgebra,
            space: source.clone(),
            target_dim,
            iterated,
        }
    }
}

impl<F: InfinityMap + ?Sized> InfinityMap for LiftedMorphism<'_, F> {
    fn source_space(&self) -> &GradedSpace {
        &self.space
    }

    fn target_dim(&self) -> usize {
        self.target_dim
    }

    fn arity(&self) -> usize {
        self.iterated.len() - 1
    }

    fn eval_basis(&self, idx: &[usize]) -> Vector {
        let n = idx.len();
        let mut out = zero_vec(self.target_dim);
        if n == 0 || n > self.arity() {
            return out;
        }
        let vdim = self.inner.source_space().dim();
        let wdim = self.target_dim / self.coalgebra.dim().max(1);
        let parts: Vec<(usize, usize)> = idx.iter().map(|&i| (i / vdim, i % vdim)).collect();
        let fdeg: Vec<i64> = idx.iter().map(|&i| self.space.degree(i)).collect();
        let ls: Vec<usize> = parts.iter().map(|p| p.1).collect();
        let cs = &self.coalgebra.space;
        let mut value: Option<Vector> = None;
        for (c, terms) in self.iterated[n].iter().enumerate() {
            for (key, coef) in terms {
                if key.iter().zip(&parts).any(|(k, p)| *k != p.0) {
                    continue;
                }
                let mut odd = false;
                let mut passed = 0i64;
                for k in 0..n {
                    if fdeg[k] % 2 != 0 && passed % 2 != 0 {
                        odd = !odd;
                    }
                    passed += cs.degree(key[k]);
                }
                let v = value.get_or_insert_with(|| self.inner.eval_basis(&ls));
                let s = sign(odd) * coef;
                for (l, x) in support(v) {
                    out[c * wdim + l] += &s * x;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bar_cobar::cobar;
    use crate::complex::{contraction_from_complex, ChainComplex};
    use crate::linfty::validate_linfty;
    use crate::scalar::q;

    #[test]
    fn zero_differential_restricts() {
        let space = GradedSpace::from_pairs(&[("x", 2), ("y", 3)]);
        let w = TableLInfinity::new(space.clone(), Matrix::zeros(2, 2), vec![(vec![0, 0], vec![q(0), q(1)])]).unwrap();
        let k = contraction_from_complex(&ChainComplex::new(space, Matrix::zeros(2, 2)).unwrap());
        let t = transfer_linfty(&w, &k, 4, Exec::Sequential).unwrap();
        assert_eq!(t.algebra.brackets, w.brackets);
        assert!(t.inclusion.is_strict());
    }

    #[test]
    fn cp2_cobar_transfer_is_coherent() {
        let omega = cobar(&CdgCoalgebra::cp2(), 8).unwrap();
        let k = contraction_from_complex(&ChainComplex::new(omega.table.space.clone(), omega.table.l1.clone()).unwrap());
        let t = transfer_linfty(&omega.table, &k, 4, Exec::Parallel).unwrap();
        validate_linfty(&t.algebra, 4, Exec::Parallel).unwrap();
        check_infinity_morphism(&t.inclusion, &t.algebra, &omega.table, 3, Exec::Parallel).unwrap();
    }
}
