//! The algebraic Hopf invariant of a map and its sphere specialization.
//!
//! For a target coalgebra `D` the invariant lives in the moduli of
//! `Hom(C, V)` where `V = H(Ω D)` carries the transferred L∞-structure.
//! The contraction onto `V` fixes the representatives; its fingerprint is
//! recorded so that only invariants computed with the same choice are
//! compared.

use sha2::{Digest, Sha256};

use crate::bar_cobar::cobar;
use crate::coalgebra::{check_coalgebra_map, validate_cdgc, CdgCoalgebra};
use crate::complex::{contraction_from_complex, ChainComplex, Contraction};
use crate::convolution::ConvolutionAlgebra;
use crate::error::{Error, Result};
use crate::freelie::FreeLieModel;
use crate::graded::GradedSpace;
use crate::linalg::{is_zero_vec, Matrix, Vector};
use crate::linfty::{LInfinity, TableLInfinity};
use crate::mc_gauge::{gauge_equivalent, gauge_flow, moduli_normal_form, GaugeOutcome, ModuliClass};
use crate::par::Exec;
use crate::scalar::format_q;
use crate::transfer::{transfer_linfty, InfinityMap, LiftedMorphism, Transferred};

/// Everything derived from the target coalgebra: its cobar construction,
/// the contraction onto homology and the transferred structure.
pub struct TargetModel {
    pub coalgebra: CdgCoalgebra,
    pub cobar: FreeLieModel,
    pub contraction: Contraction,
    pub transferred: Transferred,
    pub fingerprint: String,
    pub window: i64,
}

/// SHA-256 over the basis names and the entries of `i` and `p`.
pub fn contraction_fingerprint(k: &Contraction) -> String {
    let mut h = Sha256::new();
    for (space, m) in [(&k.big.space, &k.i), (&k.small.space, &k.p)] {
        for n in space.names() {
            h.update(n.as_bytes());
            h.update([0]);
        }
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                h.update(format_q(m.get(r, c)).as_bytes());
                h.update(*b",");
            }
            h.update(*b";");
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl TargetModel {
    pub fn new(d: &CdgCoalgebra, window: i64, exec: Exec) -> Result<Self> {
        validate_cdgc(d)?;
        let omega = cobar(d, window)?;
        let cx = ChainComplex::new(omega.table.space.clone(), omega.table.l1.clone())?;
        let k = contraction_from_complex(&cx);
        let transferred = transfer_linfty(&omega.table, &k, window.max(2) as usize, exec)?;
        let fingerprint = contraction_fingerprint(&k);
        Ok(TargetModel {
            coalgebra: d.clone(),
            cobar: omega,
            contraction: k,
            transferred,
            fingerprint,
            window,
        })
    }

    /// `H(Ω D)` with its transferred brackets.
    pub fn homotopy(&self) -> &TableLInfinity {
        &self.transferred.algebra
    }

    pub fn convolution(&self, c: &CdgCoalgebra) -> ConvolutionAlgebra<TableLInfinity> {
        ConvolutionAlgebra::new(c.clone(), self.homotopy().clone())
    }

    fn big_convolution(&self, c: &CdgCoalgebra) -> ConvolutionAlgebra<TableLInfinity> {
        ConvolutionAlgebra::new(c.clone(), self.cobar.table.clone())
    }

    /// `ι ∘ f` for a coalgebra map `f: C → D`, as an element of `Hom(C, Ω D)`.
    fn compose_universal(&self, c: &CdgCoalgebra, f: &Matrix) -> Result<Vector> {
        let w = self.cobar.table.dim();
        let mut tau = Matrix::zeros(w, c.dim());
        for d in 0..self.coalgebra.dim() {
            let g = self.cobar.generator_index[d].ok_or_else(|| {
                Error::WindowOverflow(format!(
                    "generator `{}` lies outside the cobar window {}",
                    self.coalgebra.space.name(d),
                    self.window
                ))
            })?;
            for x in 0..c.dim() {
                let e = f.get(d, x);
                if !num_traits::Zero::is_zero(e) {
                    tau.set(g, x, e.clone());
                }
            }
        }
        self.big_convolution(c).from_map(&tau)
    }

    /// Moves an MC element of `Hom(C, Ω D)` by gauge flows until `h ∘ τ = 0`
    /// and returns `p ∘ τ`, checked by pushing it back along `i′`.
    pub fn push_to_homology(&self, c: &CdgCoalgebra, tau: &[crate::scalar::Q], bound: usize) -> Result<Vector> {
        if !c.d.is_zero() {
            return Err(Error::Unsupported(
                "non-formal source: the source coalgebra must have zero differential".into(),
            ));
        }
        let big = self.big_convolution(c);
        let small = self.convolution(c);
        let hmat = &self.contraction.h;
        let pmat = &self.contraction.p;
        let compose = |m: &Matrix, v: &[crate::scalar::Q], conv_out: &ConvolutionAlgebra<TableLInfinity>| {
            let f = big.to_map(v);
            conv_out.from_map(&m.mul(&f))
        };
        let mut cur = tau.to_vec();
        let limit = 2 * c.dim() + 4;
        for _ in 0..limit {
            let ht = compose(hmat, &cur, &big)?;
            if is_zero_vec(&ht) {
                let sigma = compose(pmat, &cur, &small)?;
                if !small.is_mc(&sigma) {
                    return Err(Error::validation("homology pushforward", "p∘τ is not MC"));
                }
                let lifted = LiftedMorphism::new(&self.transferred.inclusion, c, small.space(), big.dim());
                let mut back = crate::linalg::zero_vec(big.dim());
                for n in 1..=lifted.arity() {
                    let args: Vec<&[crate::scalar::Q]> = vec![&sigma; n];
                    let v = lifted.eval(&args);
                    crate::linalg::axpy(&mut back, &(crate::scalar::one() / crate::scalar::factorial(n)), &v);
                }
                if back != cur {
                    return Err(Error::validation(
                        "homology pushforward",
                        "i′(p∘τ) differs from the rectified element",
                    ));
                }
                return Ok(sigma);
            }
            let lam: Vector = ht.iter().map(|x| -x).collect();
            cur = gauge_flow(&big, &cur, &lam, bound)?.end();
        }
        Err(Error::WindowOverflow("rectification did not terminate".into()))
    }
}

/// A map given either as a strict coalgebra morphism or directly as an MC
/// element of `Hom(C, H(Ω D))`.
#[derive(Clone, Debug)]
pub enum MapRepresentation {
    Coalgebra(Matrix),
    Mc(Vector),
}

/// `mc(f)` in `Hom(C, H(Ω D))`.
pub fn mc_of_map(c: &CdgCoalgebra, target: &TargetModel, f: &MapRepresentation, bound: usize) -> Result<Vector> {
    match f {
        MapRepresentation::Mc(tau) => {
            let conv = target.convolution(c);
            if tau.len() != conv.dim() {
                return Err(Error::Shape(format!("MC element needs {} coordinates", conv.dim())));
            }
            if !conv.is_mc(tau) {
                return Err(Error::NotMaurerCartan(format!(
                    "residual {}",
                    conv.space().describe(&conv.mc_residual(tau))
                )));
            }
            Ok(tau.clone())
        }
        MapRepresentation::Coalgebra(m) => {
            validate_cdgc(c)?;
            check_coalgebra_map(m, c, &target.coalgebra)?;
            let tau = target.compose_universal(c, m)?;
            let big = target.big_convolution(c);
            if !big.is_mc(&tau) {
                return Err(Error::validation("universal twisting", "ι∘f is not MC"));
            }
            target.push_to_homology(c, &tau, bound)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopfInvariant {
    pub class: ModuliClass,
    pub fingerprint: String,
    pub window: i64,
}

pub fn hopf_invariant(c: &CdgCoalgebra, target: &TargetModel, f: &MapRepresentation, bound: usize) -> Result<HopfInvariant> {
    let tau = mc_of_map(c, target, f, bound)?;
    let class = moduli_normal_form(&target.convolution(c), &tau, bound)?;
    Ok(HopfInvariant {
        class,
        fingerprint: target.fingerprint.clone(),
        window: target.window,
    })
}

/// Compares two invariants; refuses when they were computed with different
/// contractions.
pub fn compare_invariants(
    c: &CdgCoalgebra,
    target: &TargetModel,
    a: &HopfInvariant,
    b: &HopfInvariant,
    bound: usize,
) -> Result<GaugeOutcome> {
    if a.fingerprint != b.fingerprint || a.fingerprint != target.fingerprint {
        return Err(Error::Incomparable(format!(
            "fingerprints {} and {} differ",
            &a.fingerprint[..12.min(a.fingerprint.len())],
            &b.fingerprint[..12.min(b.fingerprint.len())]
        )));
    }
    gauge_equivalent(&target.convolution(c), &a.class.representative, &b.class.representative, bound)
}

/// Decides whether two maps are rationally homotopic. On `Equal` the paths
/// join `mc(f)` to `mc(g)`.
pub fn maps_homotopic(
    c: &CdgCoalgebra,
    target: &TargetModel,
    f: &MapRepresentation,
    g: &MapRepresentation,
    bound: usize,
) -> Result<GaugeOutcome> {
    let x = mc_of_map(c, target, f, bound)?;
    let y = mc_of_map(c, target, g, bound)?;
    gauge_equivalent(&target.convolution(c), &x, &y, bound)
}

/// `π_n(Y) ⊗ Q ≅ H_n(Ω D)`, presented as the moduli of `Hom(H̃(S^n), H(Ω D))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpherePi {
    pub degree: i64,
    pub classes: Vec<String>,
    /// Carrier indices of the MC elements `c ↦ v` for the classes above.
    pub coordinates: Vec<usize>,
    pub fingerprint: String,
}

impl SpherePi {
    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    /// The group law: sums of representatives.
    pub fn add(&self, a: &[crate::scalar::Q], b: &[crate::scalar::Q]) -> Vector {
        crate::linalg::add_vec(a, b)
    }
}

pub fn sphere_pi_n(target: &TargetModel, n: i64, bound: usize) -> Result<SpherePi> {
    if n < 1 {
        return Err(Error::WindowOverflow(format!("homotopy groups need n >= 1, got {n}")));
    }
    if n + 1 > target.window {
        return Err(Error::WindowOverflow(format!(
            "degree {n} needs a cobar window of at least {}, got {}",
            n + 1,
            target.window
        )));
    }
    let sphere = CdgCoalgebra::sphere(n);
    let conv = target.convolution(&sphere);
    let v: &GradedSpace = &target.homotopy().space;
    let classes_idx = v.in_degree(n);
    let coordinates: Vec<usize> = classes_idx.iter().map(|&l| conv.index(0, l)).collect();
    // every such element is MC and is its own normal form
    for &i in &coordinates {
        let e = crate::linalg::unit_vec(conv.dim(), i);
        if !conv.is_mc(&e) {
            return Err(Error::validation("sphere moduli", "a sphere class is not MC"));
        }
        let nf = moduli_normal_form(&conv, &e, bound)?;
        if nf.representative != e {
            return Err(Error::validation("sphere moduli", "a sphere class is not in normal form"));
        }
    }
    if conv.degree_indices(0).len() != coordinates.len() {
        return Err(Error::validation("sphere moduli", "degree-0 maps differ from H_n"));
    }
    Ok(SpherePi {
        degree: n,
        classes: classes_idx.iter().map(|&l| v.name(l).to_string()).collect(),
        coordinates,
        fingerprint: target.fingerprint.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn pi_of_s2_and_cp2() {
        let s2 = TargetModel::new(&CdgCoalgebra::sphere(2), 6, Exec::Parallel).unwrap();
        assert_eq!(sphere_pi_n(&s2, 2, 4).unwrap().dim(), 1);
        assert_eq!(sphere_pi_n(&s2, 3, 4).unwrap().dim(), 1);
        assert_eq!(sphere_pi_n(&s2, 4, 4).unwrap().dim(), 0);
        let cp2 = TargetModel::new(&CdgCoalgebra::cp2(), 7, Exec::Parallel).unwrap();
        assert_eq!(sphere_pi_n(&cp2, 2, 4).unwrap().dim(), 1);
        assert_eq!(sphere_pi_n(&cp2, 3, 4).unwrap().dim(), 0);
        assert_eq!(sphere_pi_n(&cp2, 5, 4).unwrap().dim(), 1);
    }

    #[test]
    fn identity_and_zero_maps() {
        let d = CdgCoalgebra::cp2();
        let t = TargetModel::new(&d, 7, Exec::Parallel).unwrap();
        let id = mc_of_map(&d, &t, &MapRepresentation::Coalgebra(Matrix::identity(2)), 6).unwrap();
        assert!(!is_zero_vec(&id));
        let zero = mc_of_map(&d, &t, &MapRepresentation::Coalgebra(Matrix::zeros(2, 2)), 6).unwrap();
        assert!(is_zero_vec(&zero));
        // degree-2 self map: a ↦ 2a, b ↦ 4b
        let mut m = Matrix::zeros(2, 2);
        m.set(0, 0, q(2));
        m.set(1, 1, q(4));
        let two = mc_of_map(&d, &t, &MapRepresentation::Coalgebra(m), 6).unwrap();
        let conv = t.convolution(&d);
        assert!(conv.is_mc(&two));
        assert!(matches!(gauge_equivalent(&conv, &id, &two, 6).unwrap(), GaugeOutcome::Distinct(_)));
    }
}
