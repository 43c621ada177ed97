//! Bar and cobar constructions, the bar-cobar adjunction and the counit.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::coalgebra::{check_coalgebra_map, tensor_add, CdgCoalgebra, Tensor};
use crate::complex::contraction_from_complex;
use crate::convolution::ConvolutionAlgebra;
use crate::error::{Error, Result};
use crate::freelie::{free_lie_model, FreeLieModel, LieExpr, QuillenModel};
use crate::graded::GradedSpace;
use crate::linalg::{support, Matrix, Vector};
use crate::linfty::{check_strict_morphism, LInfinity, TableLInfinity};
use crate::perm::{koszul_odd, sort_graded, unshuffles};
use crate::scalar::{factorial, sign, Q};

/// The cofree conilpotent cocommutative coalgebra on an L∞-algebra,
/// truncated to words of total degree at most `degree_max`. The truncation
/// is a sub dg coalgebra, so it is exact in every degree it contains.
#[derive(Clone, Debug)]
pub struct BarCoalgebra {
    pub coalgebra: CdgCoalgebra,
    /// The sorted letter multiset of each basis word.
    pub words: Vec<Vec<usize>>,
    pub index: BTreeMap<Vec<usize>, usize>,
    pub degree_max: i64,
}

impl BarCoalgebra {
    /// Index of the one-letter word on the given basis element of `L`.
    pub fn letter(&self, l: usize) -> Option<usize> {
        self.index.get(&vec![l]).copied()
    }
}

fn enumerate_words(degrees: &[i64], degree_max: i64) -> Vec<Vec<usize>> {
    fn rec(start: usize, degrees: &[i64], budget: i64, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for i in start..degrees.len() {
            if degrees[i] > budget {
                continue;
            }
            // odd letters may not repeat
            if degrees[i] % 2 != 0 && cur.last() == Some(&i) {
                continue;
            }
            cur.push(i);
            out.push(cur.clone());
            rec(i, degrees, budget - degrees[i], cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, degrees, degree_max, &mut Vec::new(), &mut out);
    // order by degree, then length, then letters
    out.sort_by_key(|w| (w.iter().map(|&i| degrees[i]).sum::<i64>(), w.len(), w.clone()));
    out
}

/// `B(L)` truncated at `degree_max`; requires `L` concentrated in degrees ≥ 2.
pub fn bar<L: LInfinity + ?Sized>(l: &L, degree_max: i64) -> Result<BarCoalgebra> {
    let space = l.space();
    for i in 0..space.dim() {
        if space.degree(i) < 2 {
            return Err(Error::Unsupported(format!(
                "bar construction needs degrees >= 2, `{}` has degree {}",
                space.name(i),
                space.degree(i)
            )));
        }
    }
    let words = enumerate_words(space.degrees(), degree_max);
    let index: BTreeMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
    let basis: Vec<(String, i64)> = words
        .iter()
        .map(|w| {
            let name = w.iter().map(|&i| space.name(i)).collect::<Vec<_>>().join("·");
            (name, w.iter().map(|&i| space.degree(i)).sum())
        })
        .collect();
    let bspace = GradedSpace::new(basis)?;
    let n = words.len();
    let mut d = Matrix::zeros(n, n);
    let mut delta = vec![Tensor::new(); n];
    for (col, w) in words.iter().enumerate() {
        let degs: Vec<i64> = w.iter().map(|&i| space.degree(i)).collect();
        let len = w.len();
        for k in 1..=len.min(l.max_arity()) {
            for (block, rest) in unshuffles(len, k) {
                let order: Vec<usize> = block.iter().chain(rest.iter()).copied().collect();
                let eps = sign(koszul_odd(&degs, &order));
                let inner: Vec<usize> = block.iter().map(|&p| w[p]).collect();
                let v = l.bracket_basis(&inner);
                for (x, c) in support(&v) {
                    let mut letters = vec![x];
                    letters.extend(rest.iter().map(|&p| w[p]));
                    if let Some((sorted, odd)) = sort_graded(&letters, |i| space.degree(i)) {
                        let row = *index.get(&sorted).ok_or_else(|| {
                            Error::WindowOverflow("bar differential leaves the truncation".into())
                        })?;
                        d.add_to(row, col, &(&eps * sign(odd) * c));
                    }
                }
            }
        }
        for k in 1..len {
            for (block, rest) in unshuffles(len, k) {
                let order: Vec<usize> = block.iter().chain(rest.iter()).copied().collect();
                let eps = sign(koszul_odd(&degs, &order));
                let left: Vec<usize> = block.iter().map(|&p| w[p]).collect();
                let right: Vec<usize> = rest.iter().map(|&p| w[p]).collect();
                tensor_add(&mut delta[col], vec![index[&left], index[&right]], eps);
            }
        }
    }
    let coalgebra = CdgCoalgebra::new(bspace, d, delta)?;
    Ok(BarCoalgebra {
        coalgebra,
        words,
        index,
        degree_max,
    })
}

/// `Ω(C)` truncated at `degree_max`.
pub fn cobar(c: &CdgCoalgebra, degree_max: i64) -> Result<FreeLieModel> {
    free_lie_model(&QuillenModel::from_coalgebra(c), degree_max)
}

fn check_strict_target(l: &TableLInfinity, degree_max: i64) -> Result<()> {
    if !l.is_strict_lie() {
        return Err(Error::Unsupported(
            "algebra maps out of a cobar construction need a strict dg Lie target".into(),
        ));
    }
    if let Some((_, hi)) = l.space.degree_range() {
        if hi >= degree_max {
            return Err(Error::WindowOverflow(format!(
                "target reaches degree {hi}; the cobar window must exceed it (got {degree_max})"
            )));
        }
    }
    Ok(())
}

/// The Lie map `g: Ω C → L` extending a degree-0 map `τ: C → L`
/// (given as a matrix `L × C`).
pub fn algebra_map_from_tau(tau: &Matrix, omega: &FreeLieModel, l: &TableLInfinity) -> Result<Matrix> {
    check_strict_target(l, omega.degree_max)?;
    let n = omega.table.space.dim();
    let mut cols: Vec<Vector> = Vec::with_capacity(n);
    for e in &omega.exprs {
        let v = match *e {
            LieExpr::Generator(g) => tau.col(g),
            LieExpr::Bracket(g, w) => {
                let a = tau.col(g);
                let b = cols[w].clone();
                l.bracket(&[&a, &b])
            }
        };
        cols.push(v);
    }
    Ok(Matrix::from_cols(&cols, l.dim()))
}

/// Restriction of a Lie map `Ω C → L` to the generators.
pub fn tau_from_algebra_map(g: &Matrix, omega: &FreeLieModel, c_dim: usize, l_dim: usize) -> Result<Matrix> {
    let mut tau = Matrix::zeros(l_dim, c_dim);
    for (c, idx) in omega.generator_index.iter().enumerate() {
        match idx {
            Some(j) => {
                for r in 0..l_dim {
                    tau.set(r, c, g.get(r, *j).clone());
                }
            }
            None => {
                return Err(Error::WindowOverflow(
                    "a generator lies outside the cobar window".into(),
                ))
            }
        }
    }
    Ok(tau)
}

/// The coalgebra map `F: C → B(L)` with `F(c) = Σ_n (1/n!) τ^{⊗n} Δ^{(n)}(c)`,
/// read in the symmetric-word basis.
pub fn coalgebra_map_from_tau<L: LInfinity>(
    tau: &Matrix,
    c: &CdgCoalgebra,
    b: &BarCoalgebra,
    l: &L,
) -> Result<Matrix> {
    let lspace = l.space();
    let mut f = Matrix::zeros(b.coalgebra.dim(), c.dim());
    let top = c.top_arity();
    for x in 0..c.dim() {
        for n in 1..=top {
            let scale = Q::from_integer(1.into()) / factorial(n);
            for (key, coef) in c.iterated(x, n) {
                // expand τ(c_1)⊗…⊗τ(c_n) over supports
                let mut partial: Vec<(Vec<usize>, Q)> = vec![(Vec::new(), &coef * &scale)];
                for &ck in &key {
                    let col = tau.col(ck);
                    let mut next = Vec::new();
                    for (letters, a) in &partial {
                        for (li, y) in support(&col) {
                            let mut w = letters.clone();
                            w.push(li);
                            next.push((w, a * y));
                        }
                    }
                    partial = next;
                }
                for (letters, a) in partial {
                    if let Some((sorted, odd)) = sort_graded(&letters, |i| lspace.degree(i)) {
                        let row = *b.index.get(&sorted).ok_or_else(|| {
                            Error::WindowOverflow("coalgebra map leaves the bar truncation".into())
                        })?;
                        f.add_to(row, x, &(sign(odd) * a));
                    }
                }
            }
        }
    }
    Ok(f)
}

/// `τ = π ∘ F`: the one-letter component of a coalgebra map into `B(L)`.
pub fn tau_from_coalgebra_map(f: &Matrix, b: &BarCoalgebra, l_dim: usize) -> Matrix {
    let mut tau = Matrix::zeros(l_dim, f.cols());
    for li in 0..l_dim {
        if let Some(row) = b.letter(li) {
            for x in 0..f.cols() {
                tau.set(li, x, f.get(row, x).clone());
            }
        }
    }
    tau
}

/// The three descriptions of one twisting morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionTriple {
    pub tau: Matrix,
    pub algebra_map: Matrix,
    pub coalgebra_map: Matrix,
}

/// Converts an MC element of `Hom(C, L)` into the Lie map `Ω C → L` and the
/// coalgebra map `C → B L`, verifying both morphism properties and both
/// round trips exactly.
pub fn adjunction_mc(
    tau: &Matrix,
    conv: &ConvolutionAlgebra<TableLInfinity>,
    omega: &FreeLieModel,
    bar_l: &BarCoalgebra,
) -> Result<AdjunctionTriple> {
    let v = conv.from_map(tau)?;
    let r = conv.mc_residual(&v);
    if r.iter().any(|x| !x.is_zero()) {
        return Err(Error::NotMaurerCartan(format!(
            "residual {}",
            conv.space().describe(&r)
        )));
    }
    let l = &conv.target;
    let g = algebra_map_from_tau(tau, omega, l)?;
    check_strict_morphism(&g, &omega.table, l, 2)?;
    let f = coalgebra_map_from_tau(tau, &conv.source, bar_l, l)?;
    check_coalgebra_map(&f, &conv.source, &bar_l.coalgebra)?;
    if tau_from_algebra_map(&g, omega, conv.source.dim(), l.dim())? != *tau {
        return Err(Error::validation("adjunction round trip", "g∘ι differs from τ"));
    }
    if tau_from_coalgebra_map(&f, bar_l, l.dim()) != *tau {
        return Err(Error::validation("adjunction round trip", "π∘F differs from τ"));
    }
    Ok(AdjunctionTriple {
        tau: tau.clone(),
        algebra_map: g,
        coalgebra_map: f,
    })
}

/// Inverse direction: a Lie map `Ω C → L` determines `τ`, which must be MC.
pub fn mc_from_algebra_map(
    g: &Matrix,
    conv: &ConvolutionAlgebra<TableLInfinity>,
    omega: &FreeLieModel,
) -> Result<Matrix> {
    check_strict_morphism(g, &omega.table, &conv.target, 2)?;
    let tau = tau_from_algebra_map(g, omega, conv.source.dim(), conv.target.dim())?;
    let v = conv.from_map(&tau)?;
    if !conv.is_mc(&v) {
        return Err(Error::NotMaurerCartan("restriction of a Lie map is not MC".into()));
    }
    Ok(tau)
}

/// Inverse direction: a coalgebra map `C → B L` determines `τ`, which must be MC.
pub fn mc_from_coalgebra_map(
    f: &Matrix,
    conv: &ConvolutionAlgebra<TableLInfinity>,
    bar_l: &BarCoalgebra,
) -> Result<Matrix> {
    check_coalgebra_map(f, &conv.source, &bar_l.coalgebra)?;
    let tau = tau_from_coalgebra_map(f, bar_l, conv.target.dim());
    let v = conv.from_map(&tau)?;
    if !conv.is_mc(&v) {
        return Err(Error::NotMaurerCartan("projection of a coalgebra map is not MC".into()));
    }
    Ok(tau)
}

/// The factorization of an MC element through the universal twisting
/// morphisms: `φ = π ∘ f_φ` and `φ = g_φ ∘ ι`.
pub fn universal_factorization(
    tau: &Matrix,
    conv: &ConvolutionAlgebra<TableLInfinity>,
    omega: &FreeLieModel,
    bar_l: &BarCoalgebra,
) -> Result<(Matrix, Matrix)> {
    let t = adjunction_mc(tau, conv, omega, bar_l)?;
    Ok((t.coalgebra_map, t.algebra_map))
}

/// Outcome of the counit check: per degree, whether the induced map on
/// homology is an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounitReport {
    pub degrees: Vec<(i64, usize, usize, bool)>,
    pub window_top: i64,
}

impl CounitReport {
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(|d| d.3)
    }
}

/// Builds `Ω B L → L` and checks it is a quasi-isomorphism in degrees
/// `≤ degree_max − 2`.
pub fn counit_quasi_iso_check(l: &TableLInfinity, degree_max: i64) -> Result<CounitReport> {
    check_strict_target(l, degree_max)?;
    let b = bar(l, degree_max)?;
    let omega = cobar(&b.coalgebra, degree_max)?;
    let n = l.dim();
    // π: B L → L as a twisting morphism
    let mut pi = Matrix::zeros(n, b.coalgebra.dim());
    for li in 0..n {
        if let Some(row) = b.letter(li) {
            pi.set(li, row, Q::from_integer(1.into()));
        }
    }
    let eps = algebra_map_from_tau(&pi, &omega, l)?;
    check_strict_morphism(&eps, &omega.table, l, 2)?;
    let ko = contraction_from_complex(&crate::complex::ChainComplex::new(
        omega.table.space.clone(),
        omega.table.l1.clone(),
    )?);
    let kl = contraction_from_complex(&crate::complex::ChainComplex::new(l.space.clone(), l.l1.clone())?);
    let induced = kl.p.mul(&eps).mul(&ko.i);
    let top = degree_max - 2;
    let mut degrees = Vec::new();
    let lo = 2;
    for deg in lo..=top {
        let rows = kl.small.space.in_degree(deg);
        let cols = ko.small.space.in_degree(deg);
        let block = induced.select(&rows, &cols);
        let iso = rows.len() == cols.len() && block.rank() == rows.len();
        degrees.push((deg, cols.len(), rows.len(), iso));
    }
    Ok(CounitReport {
        degrees,
        window_top: top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::validate_cdgc;
    use crate::scalar::q;

    fn s2_model() -> TableLInfinity {
        let space = GradedSpace::from_pairs(&[("x", 2), ("y", 3)]);
        TableLInfinity::new(space, Matrix::zeros(2, 2), vec![(vec![0, 0], vec![q(0), q(1)])]).unwrap()
    }

    #[test]
    fn bar_of_s2_model_is_a_coalgebra() {
        let b = bar(&s2_model(), 8).unwrap();
        validate_cdgc(&b.coalgebra).unwrap();
        let xx = b.index[&vec![0, 0]];
        let y = b.index[&vec![1]];
        assert_eq!(*b.coalgebra.d.get(y, xx), q(1));
    }

    #[test]
    fn counit_on_s2_model() {
        let r = counit_quasi_iso_check(&s2_model(), 7).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn zero_element_gives_zero_maps() {
        let l = s2_model();
        let c = CdgCoalgebra::cp2();
        let conv = ConvolutionAlgebra::new(c.clone(), l.clone());
        let omega = cobar(&c, 5).unwrap();
        let b = bar(&l, 5).unwrap();
        let t = adjunction_mc(&Matrix::zeros(2, 2), &conv, &omega, &b).unwrap();
        assert!(t.algebra_map.is_zero());
        assert!(t.coalgebra_map.is_zero());
    }

    #[test]
    fn bar_differential_is_zero_for_abelian() {
        let l = TableLInfinity::abelian(GradedSpace::from_pairs(&[("x", 2)]));
        let b = bar(&l, 8).unwrap();
        assert_eq!(b.coalgebra.dim(), 4);
        assert!(b.coalgebra.d.is_zero());
    }
}
