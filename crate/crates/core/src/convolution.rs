//! The convolution L∞-algebra `Hom(C, L)`.
//!
//! The basis element `e(c, l)` is the map sending `c` to `l` and every other
//! basis element of `C` to zero; its degree is `|l| − |c|`. Brackets:
//!
//! * `l_1(f) = d_L∘f − (−1)^{|f|} f∘d_C`
//! * `l_n(f_1..f_n) = l_n^L ∘ (f_1⊗…⊗f_n) ∘ Δ^{(n)}` for `n ≥ 2`, with the
//!   Koszul sign `(−1)^{Σ_{j<i}|f_i||c_j|}` from evaluating the tensor of maps.

use num_traits::Zero;

use crate::coalgebra::{check_coalgebra_map, CdgCoalgebra};
use crate::complex::{contraction_from_complex, ChainComplex, Contraction};
use crate::error::{Error, Result};
use crate::graded::GradedSpace;
use crate::linalg::{zero_vec, Matrix, Vector};
use crate::linfty::{check_strict_morphism, is_mc, mc_residual, LInfinity, Twisted};
use crate::scalar::{sign, Q};

pub struct ConvolutionAlgebra<L: LInfinity> {
    pub source: CdgCoalgebra,
    pub target: L,
    space: GradedSpace,
    /// `iterated[n][c]` lists the terms of `Δ^{(n)}(c)`.
    iterated: Vec<Vec<Vec<(Vec<usize>, Q)>>>,
    arity: usize,
}

impl<L: LInfinity> ConvolutionAlgebra<L> {
    pub fn new(source: CdgCoalgebra, target: L) -> Self {
        let cs = &source.space;
        let ls = target.space();
        let mut basis = Vec::with_capacity(cs.dim() * ls.dim());
        for c in 0..cs.dim() {
            for l in 0..ls.dim() {
                basis.push((format!("{}->{}", cs.name(c), ls.name(l)), ls.degree(l) - cs.degree(c)));
            }
        }
        let space = GradedSpace::new(basis).expect("pair names are distinct");
        let top = source.top_arity();
        let arity = top.min(target.max_arity()).max(1);
        let mut iterated = vec![Vec::new(); arity + 1];
        for (n, slot) in iterated.iter_mut().enumerate().skip(2) {
            *slot = (0..source.dim())
                .map(|c| source.iterated(c, n).into_iter().collect())
                .collect();
        }
        ConvolutionAlgebra {
            source,
            target,
            space,
            iterated,
            arity,
        }
    }

    pub fn index(&self, c: usize, l: usize) -> usize {
        c * self.target.dim() + l
    }

    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.target.dim(), i % self.target.dim())
    }

    /// Largest arity at which brackets can be nonzero: bounded both by the
    /// target and by the longest nonvanishing iterated coproduct.
    pub fn arity_window(&self) -> usize {
        self.arity
    }

    /// Converts a matrix `L × C` into a carrier vector.
    pub fn from_map(&self, f: &Matrix) -> Result<Vector> {
        if f.rows() != self.target.dim() || f.cols() != self.source.dim() {
            return Err(Error::Shape(format!(
                "map must be {}x{} (target x source)",
                self.target.dim(),
                self.source.dim()
            )));
        }
        let mut v = zero_vec(self.dim());
        for c in 0..f.cols() {
            for l in 0..f.rows() {
                v[self.index(c, l)] = f.get(l, c).clone();
            }
        }
        Ok(v)
    }

    pub fn to_map(&self, v: &[Q]) -> Matrix {
        let mut f = Matrix::zeros(self.target.dim(), self.source.dim());
        for (i, x) in crate::linalg::support(v) {
            let (c, l) = self.split(i);
            f.set(l, c, x.clone());
        }
        f
    }

    /// Indices of the carrier basis of the given degree.
    pub fn degree_indices(&self, k: i64) -> Vec<usize> {
        self.space.in_degree(k)
    }

    pub fn mc_residual(&self, tau: &[Q]) -> Vector {
        mc_residual(self, tau)
    }

    pub fn is_mc(&self, tau: &[Q]) -> bool {
        is_mc(self, tau)
    }

    fn check_mc(&self, tau: &[Q]) -> Result<()> {
        if let Some(d) = self.space.vector_degree(tau) {
            if d != 0 {
                return Err(Error::Degree(format!("MC candidate has degree {d}, expected 0")));
            }
        }
        let r = self.mc_residual(tau);
        if r.iter().all(|x| x.is_zero()) {
            Ok(())
        } else {
            Err(Error::NotMaurerCartan(format!("residual {}", self.space.describe(&r))))
        }
    }

    /// The twisted differential `d^τ` as a chain complex on the carrier.
    pub fn twist(&self, tau: &[Q]) -> Result<ChainComplex> {
        self.check_mc(tau)?;
        let t = Twisted::new(self, tau.to_vec());
        ChainComplex::new(self.space.clone(), t.ell1())
    }

    /// Contraction of the twisted complex onto its homology; the homology
    /// in degree `n` models `π_n` of the mapping-space component of `τ`.
    pub fn twisted_contraction(&self, tau: &[Q]) -> Result<Contraction> {
        Ok(contraction_from_complex(&self.twist(tau)?))
    }

    pub fn twisted_homology(&self, tau: &[Q], n: i64) -> Result<TwistedHomology> {
        if n < 1 {
            return Err(Error::WindowOverflow(format!(
                "homotopy groups are computed in degrees >= 1, got {n}"
            )));
        }
        let k = self.twisted_contraction(tau)?;
        let classes = k.small.space.in_degree(n);
        let reps = classes.iter().map(|&j| k.i.col(j)).collect();
        Ok(TwistedHomology {
            degree: n,
            dim: classes.len(),
            representatives: reps,
        })
    }

    /// Matrix of `f ↦ g∘f` from `Hom(C, L)` to `Hom(C, L')`, after checking
    /// that `g` is a strict morphism.
    pub fn pushforward<M: LInfinity>(&self, g: &Matrix, other: &ConvolutionAlgebra<M>) -> Result<Matrix> {
        check_strict_morphism(g, &self.target, &other.target, self.target.max_arity().max(other.target.max_arity()))?;
        if other.source != self.source {
            return Err(Error::Shape("pushforward requires the same source coalgebra".into()));
        }
        let mut m = Matrix::zeros(other.dim(), self.dim());
        for c in 0..self.source.dim() {
            for l in 0..self.target.dim() {
                for l2 in 0..other.target.dim() {
                    let e = g.get(l2, l);
                    if !e.is_zero() {
                        m.set(other.index(c, l2), self.index(c, l), e.clone());
                    }
                }
            }
        }
        Ok(m)
    }

    /// Matrix of `f ↦ f∘h` from `Hom(C, L)` to `Hom(C', L)` for a coalgebra
    /// map `h: C' → C`.
    pub fn pullback<M: LInfinity>(&self, h: &Matrix, other: &ConvolutionAlgebra<M>) -> Result<Matrix> {
        check_coalgebra_map(h, &other.source, &self.source)?;
        if other.target.space() != self.target.space() {
            return Err(Error::Shape("pullback requires the same target".into()));
        }
        let mut m = Matrix::zeros(other.dim(), self.dim());
        for c in 0..self.source.dim() {
            for c2 in 0..other.source.dim() {
                let e = h.get(c, c2);
                if e.is_zero() {
                    continue;
                }
                for l in 0..self.target.dim() {
                    m.set(other.index(c2, l), self.index(c, l), e.clone());
                }
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedHomology {
    pub degree: i64,
    pub dim: usize,
    pub representatives: Vec<Vector>,
}

impl<L: LInfinity> LInfinity for ConvolutionAlgebra<L> {
    fn space(&self) -> &GradedSpace {
        &self.space
    }

    fn max_arity(&self) -> usize {
        self.arity
    }

    fn bracket_basis(&self, idx: &[usize]) -> Vector {
        let n = idx.len();
        let mut out = zero_vec(self.dim());
        let cs = &self.source.space;
        if n == 1 {
            let (c, l) = self.split(idx[0]);
            let fdeg = self.space.degree(idx[0]);
            let dl = self.target.bracket_basis(&[l]);
            for (l2, x) in crate::linalg::support(&dl) {
                out[self.index(c, l2)] += x;
            }
            // − (−1)^{|f|} f∘d_C: (f∘d)(c') = d[c][c'] · l
            let s = -sign(fdeg % 2 != 0);
            for c2 in 0..cs.dim() {
                let e = self.source.d.get(c, c2);
                if !e.is_zero() {
                    out[self.index(c2, l)] += &s * e;
                }
            }
            return out;
        }
        if n > self.arity {
            return out;
        }
        let parts: Vec<(usize, usize)> = idx.iter().map(|&i| self.split(i)).collect();
        let fdeg: Vec<i64> = idx.iter().map(|&i| self.space.degree(i)).collect();
        let ls: Vec<usize> = parts.iter().map(|p| p.1).collect();
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
                let v = value.get_or_insert_with(|| self.target.bracket_basis(&ls));
                let s = sign(odd) * coef;
                for (l, x) in crate::linalg::support(v) {
                    out[self.index(c, l)] += &s * x;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linfty::{validate_linfty, TableLInfinity};
    use crate::par::Exec;
    use crate::scalar::{q, q_frac};

    fn s2_model() -> TableLInfinity {
        let space = GradedSpace::from_pairs(&[("x", 2), ("y", 3)]);
        TableLInfinity::new(space, Matrix::zeros(2, 2), vec![(vec![0, 0], vec![q(0), q(1)])]).unwrap()
    }

    #[test]
    fn cp2_bracket_and_residual() {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::cp2(), s2_model());
        let f = h.index(0, 0); // a -> x
        let v = h.bracket_basis(&[f, f]);
        let mut expected = zero_vec(h.dim());
        expected[h.index(1, 1)] = q(1); // b -> y
        assert_eq!(v, expected);
        let mut tau = zero_vec(h.dim());
        tau[f] = q(3);
        let r = h.mc_residual(&tau);
        let mut expected = zero_vec(h.dim());
        expected[h.index(1, 1)] = q_frac(9, 2);
        assert_eq!(r, expected);
    }

    #[test]
    fn convolution_satisfies_jacobi() {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::sphere_product(2, 2), s2_model());
        validate_linfty(&h, 4, Exec::Sequential).unwrap();
    }
}
