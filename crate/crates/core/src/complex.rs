//! Chain complexes, homology and contractions.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graded::GradedSpace;
use crate::linalg::{extend_independent, support, unit_vec, zero_vec, CoordinateSystem, Matrix, Vector};
use crate::scalar::Q;

/// A finite chain complex with a degree −1 differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub space: GradedSpace,
    pub d: Matrix,
}

impl ChainComplex {
    pub fn new(space: GradedSpace, d: Matrix) -> Result<Self> {
        let cx = ChainComplex { space, d };
        cx.check_shape()?;
        cx.check_square_zero()?;
        Ok(cx)
    }

    pub fn zero_differential(space: GradedSpace) -> Self {
        let n = space.dim();
        ChainComplex {
            space,
            d: Matrix::zeros(n, n),
        }
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.space.dim();
        if self.d.rows() != n || self.d.cols() != n {
            return Err(Error::Shape(format!(
                "differential is {}x{}, space has dimension {n}",
                self.d.rows(),
                self.d.cols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if !self.d.get(i, j).is_zero() && self.space.degree(i) != self.space.degree(j) - 1 {
                    return Err(Error::Degree(format!(
                        "differential entry [{i}][{j}] sends `{}` to `{}`, which is not one degree lower",
                        self.space.name(j),
                        self.space.name(i)
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_square_zero(&self) -> Result<()> {
        let dd = self.d.mul(&self.d);
        for j in 0..dd.cols() {
            if (0..dd.rows()).any(|i| !dd.get(i, j).is_zero()) {
                return Err(Error::NotSquareZero {
                    element: self.space.name(j).to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// A contraction of `big` onto `small`:
/// `p i = 1`, `1 − i p = d h + h d`, and `h h = h i = p h = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub big: ChainComplex,
    pub small: ChainComplex,
    pub i: Matrix,
    pub p: Matrix,
    pub h: Matrix,
}

/// Result of checking the contraction identities; each entry is the name of
/// an identity that failed.
pub fn contraction_failures(k: &Contraction) -> Vec<&'static str> {
    let nw = k.big.dim();
    let nv = k.small.dim();
    let dw = &k.big.d;
    let dv = &k.small.d;
    let mut failed = Vec::new();
    if k.p.mul(&k.i) != Matrix::identity(nv) {
        failed.push("p∘i = id");
    }
    let lhs = Matrix::identity(nw).sub(&k.i.mul(&k.p));
    let rhs = dw.mul(&k.h).add(&k.h.mul(dw));
    if lhs != rhs {
        failed.push("id − i∘p = d∘h + h∘d");
    }
    if !k.h.mul(&k.h).is_zero() {
        failed.push("h∘h = 0");
    }
    if !k.h.mul(&k.i).is_zero() {
        failed.push("h∘i = 0");
    }
    if !k.p.mul(&k.h).is_zero() {
        failed.push("p∘h = 0");
    }
    if dw.mul(&k.i) != k.i.mul(dv) {
        failed.push("i is a chain map");
    }
    if dv.mul(&k.p) != k.p.mul(dw) {
        failed.push("p is a chain map");
    }
    failed
}

impl Contraction {
    pub fn check(&self) -> Result<()> {
        match contraction_failures(self).first() {
            None => Ok(()),
            Some(id) => Err(Error::validation(*id, "contraction identity does not hold")),
        }
    }
}

/// Deterministic contraction of a complex onto its homology.
///
/// In each degree `n` the space splits as `B ⊕ H ⊕ C`: `C` is spanned by the
/// pivot basis vectors of the outgoing differential, `B` by the images of the
/// pivot vectors one degree up, and `H` by the kernel basis vectors that
/// extend `B` to a basis of the cycles. The homotopy inverts `d` from `B` to
/// the pivot vectors above and vanishes on `H ⊕ C`.
pub fn contraction_from_complex(cx: &ChainComplex) -> Contraction {
    let space = &cx.space;
    let n = space.dim();
    let mut degrees: Vec<i64> = space.degrees().to_vec();
    degrees.sort();
    degrees.dedup();

    let mut h = Matrix::zeros(n, n);
    let mut class_basis: Vec<(String, i64)> = Vec::new();
    let mut reps: Vec<Vector> = Vec::new();
    // entries (class, basis element, value) of the projection
    let mut p_entries: Vec<(usize, usize, Q)> = Vec::new();

    for &deg in &degrees {
        let here = space.in_degree(deg);
        let above = space.in_degree(deg + 1);
        let below = space.in_degree(deg - 1);
        let d_out = cx.d.select(&below, &here);
        let d_in = cx.d.select(&here, &above);

        let in_pivots = d_in.echelon().pivots; // columns among `above`
        let b_vecs: Vec<Vector> = in_pivots.iter().map(|&c| d_in.col(c)).collect();
        let kernel = d_out.kernel();
        let chosen = extend_independent(&b_vecs, &kernel, here.len());
        let h_vecs: Vec<Vector> = chosen.iter().map(|&k| kernel[k].clone()).collect();
        let out_pivots = d_out.echelon().pivots;
        let c_vecs: Vec<Vector> = out_pivots.iter().map(|&c| unit_vec(here.len(), c)).collect();

        let mut all = b_vecs.clone();
        all.extend(h_vecs.iter().cloned());
        all.extend(c_vecs);
        let coords = CoordinateSystem::new(&all, here.len());

        let offset = reps.len();
        for (k, hv) in h_vecs.iter().enumerate() {
            let mut rep = zero_vec(n);
            for (j, x) in hv.iter().enumerate() {
                rep[here[j]] = x.clone();
            }
            let name = match support(&rep).collect::<Vec<_>>().as_slice() {
                [(j, x)] if x.is_one() => space.name(*j).to_string(),
                _ => format!("h{deg}.{k}"),
            };
            class_basis.push((name, deg));
            reps.push(rep);
        }

        let nb = b_vecs.len();
        for (local_j, &global_j) in here.iter().enumerate() {
            let c = coords
                .coords(&unit_vec(here.len(), local_j))
                .expect("B, H, C span the degree");
            // B-coordinates go to the pivot vectors one degree up
            for (k, &piv) in in_pivots.iter().enumerate() {
                if !c[k].is_zero() {
                    h.add_to(above[piv], global_j, &c[k]);
                }
            }
            for k in 0..h_vecs.len() {
                if !c[nb + k].is_zero() {
                    p_entries.push((offset + k, global_j, c[nb + k].clone()));
                }
            }
        }
    }

    let hdim = reps.len();
    let mut p = Matrix::zeros(hdim, n);
    for (r, c, x) in p_entries {
        p.set(r, c, x);
    }
    let i = Matrix::from_cols(&reps, n);
    let small_space = GradedSpace::new(class_basis.clone()).unwrap_or_else(|_| {
        let positional = class_basis
            .iter()
            .enumerate()
            .map(|(k, (_, d))| (format!("h{k}"), *d))
            .collect();
        GradedSpace::new(positional).expect("distinct positional names")
    });
    Contraction {
        big: cx.clone(),
        small: ChainComplex::zero_differential(small_space),
        i,
        p,
        h,
    }
}

/// Homology together with cycle representatives (`i`) and the projection (`p`).
pub fn homology(cx: &ChainComplex) -> (GradedSpace, Matrix, Matrix) {
    let k = contraction_from_complex(cx);
    (k.small.space, k.i, k.p)
}

/// Replaces `h` by a homotopy satisfying the side conditions, keeping `i`, `p`.
/// Requires `p i = 1` and `1 − i p = d h + h d`.
pub fn enforce_side_conditions(k: &Contraction) -> Contraction {
    let d = &k.big.d;
    let nw = k.big.dim();
    let pi_part = Matrix::identity(nw).sub(&k.i.mul(&k.p)); // = dh + hd
    let h1 = pi_part.mul(&k.h).mul(&pi_part);
    let h2 = h1.mul(d).mul(&h1);
    Contraction {
        h: h2,
        ..k.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn acyclic_pair() {
        let space = GradedSpace::from_pairs(&[("a", 2), ("b", 3)]);
        let mut d = Matrix::zeros(2, 2);
        d.set(0, 1, q(1));
        let cx = ChainComplex::new(space, d).unwrap();
        let k = contraction_from_complex(&cx);
        assert_eq!(k.small.dim(), 0);
        assert_eq!(*k.h.get(1, 0), q(1));
        assert!(contraction_failures(&k).is_empty());
    }

    #[test]
    fn zero_differential_is_identity() {
        let space = GradedSpace::from_pairs(&[("c", 3)]);
        let cx = ChainComplex::zero_differential(space);
        let k = contraction_from_complex(&cx);
        assert_eq!(k.i, Matrix::identity(1));
        assert_eq!(k.p, Matrix::identity(1));
        assert!(k.h.is_zero());
        assert_eq!(k.small.space.name(0), "c");
    }

    #[test]
    fn rejects_non_square_zero() {
        let space = GradedSpace::from_pairs(&[("a", 1), ("b", 2), ("c", 3)]);
        let mut d = Matrix::zeros(3, 3);
        d.set(0, 1, q(1));
        d.set(1, 2, q(1));
        match ChainComplex::new(space, d) {
            Err(Error::NotSquareZero { element }) => assert_eq!(element, "c"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
