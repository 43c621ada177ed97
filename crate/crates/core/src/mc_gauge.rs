//! Gauge paths, gauge flow, the gauge-equivalence decision and moduli
//! normal forms.
//!
//! A path is `z = X(t) + dt·Λ(t)` in `Ω₁ ⊗ L` with polynomial coefficients.
//! It is a Maurer-Cartan element exactly when `X(t)` is MC for every `t` and
//! `X′(t) = d^{X(t)} Λ(t)`, where `d^X λ = l_1 λ + Σ_{m≥1} (1/m!) l_{m+1}(λ, X, …, X)`.

use num_traits::{One, Zero};

use crate::convolution::ConvolutionAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{axpy, is_zero_vec, sub_vec, support, zero_vec, Matrix, Vector};
use crate::linfty::{is_mc, mc_residual, LInfinity, Twisted};
use crate::scalar::{q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugePath {
    /// Coefficients of `X(t)` by power of `t`.
    pub x: Vec<Vector>,
    /// Coefficients of `Λ(t)` by power of `t`.
    pub lambda: Vec<Vector>,
}

impl GaugePath {
    pub fn constant(x: Vector) -> Self {
        GaugePath {
            x: vec![x],
            lambda: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.first().map(Vec::len).unwrap_or(0)
    }

    /// Largest power of `t` that occurs.
    pub fn poly_degree(&self) -> usize {
        let last = |p: &[Vector]| p.iter().rposition(|v| !is_zero_vec(v)).unwrap_or(0);
        last(&self.x).max(last(&self.lambda))
    }

    pub fn start(&self) -> Vector {
        self.x.first().cloned().unwrap_or_default()
    }

    pub fn end(&self) -> Vector {
        let mut out = zero_vec(self.dim());
        for v in &self.x {
            axpy(&mut out, &Q::one(), v);
        }
        out
    }
}

/// Enumerates sorted multisets of size `m` from `0..n` whose entries sum to
/// `total`, together with `1/∏ mult!`.
fn weighted_multisets(n: usize, m: usize, total: usize) -> Vec<(Vec<usize>, Q)> {
    fn rec(start: usize, n: usize, left: usize, total: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for i in start..n.min(total + 1) {
            cur.push(i);
            rec(i, n, left - 1, total - i, cur, out);
            cur.pop();
        }
    }
    let mut sets = Vec::new();
    rec(0, n, m, total, &mut Vec::new(), &mut sets);
    sets.into_iter()
        .map(|s| {
            let mut w = Q::one();
            let mut run = 1;
            for k in 1..=s.len() {
                if k < s.len() && s[k] == s[k - 1] {
                    run += 1;
                } else {
                    for r in 2..=run {
                        w /= q(r as i64);
                    }
                    run = 1;
                }
            }
            (s, w)
        })
        .collect()
}

/// Coefficient of `t^k` in `Σ_{m≥m0} (1/m!) l_{p+m}(prefix…, X(t), …, X(t))`
/// for `X(t)` of degree 0.
fn series_coeff<L: LInfinity + ?Sized>(l: &L, prefix: &[&[Q]], xs: &[Vector], k: usize, m0: usize) -> Vector {
    let mut out = zero_vec(l.dim());
    let p = prefix.len();
    for m in m0..=l.max_arity().saturating_sub(p) {
        if p + m == 0 {
            continue;
        }
        for (set, w) in weighted_multisets(xs.len(), m, k) {
            if set.iter().any(|&i| is_zero_vec(&xs[i])) {
                continue;
            }
            let mut args: Vec<&[Q]> = prefix.to_vec();
            args.extend(set.iter().map(|&i| xs[i].as_slice()));
            let v = l.bracket(&args);
            axpy(&mut out, &w, &v);
        }
    }
    out
}

/// Exact residuals of the path equations, by power of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathReport {
    pub passed: bool,
    /// `Σ (1/n!) l_n(X(t)^n)`.
    pub mc_residual: Vec<Vector>,
    /// `X′(t) − d^{X(t)} Λ(t)`.
    pub flow_residual: Vec<Vector>,
    pub detail: Option<String>,
}

/// Checks that a path is a Maurer-Cartan element of `Ω₁ ⊗ L`, using exact
/// polynomial arithmetic with no truncation.
pub fn path_check<L: LInfinity + ?Sized>(l: &L, z: &GaugePath) -> PathReport {
    let space = l.space();
    let mut detail = None;
    for (k, v) in z.x.iter().enumerate() {
        if v.len() != l.dim() {
            detail = Some(format!("coefficient t^{k} has the wrong length"));
        } else if let Some(d) = space.vector_degree(v) {
            if d != 0 {
                detail = Some(format!("coefficient t^{k} of X has degree {d}"));
            }
        }
    }
    for (k, v) in z.lambda.iter().enumerate() {
        if v.len() != l.dim() {
            detail = Some(format!("coefficient t^{k} dt has the wrong length"));
        } else if let Some(d) = space.vector_degree(v) {
            if d != 1 {
                detail = Some(format!("coefficient t^{k} of Λ has degree {d}"));
            }
        }
    }
    if let Some(d) = detail {
        return PathReport {
            passed: false,
            mc_residual: Vec::new(),
            flow_residual: Vec::new(),
            detail: Some(d),
        };
    }
    let a = l.max_arity().max(1);
    let dx = z.x.len().saturating_sub(1);
    let top_mc = dx * a;
    let mc: Vec<Vector> = (0..=top_mc).map(|k| series_coeff(l, &[], &z.x, k, 1)).collect();
    let top_flow = (dx * a + z.lambda.len()).max(dx);
    let mut flow: Vec<Vector> = Vec::with_capacity(top_flow + 1);
    for k in 0..=top_flow {
        let mut v = zero_vec(l.dim());
        if k + 1 < z.x.len() {
            axpy(&mut v, &q(k as i64 + 1), &z.x[k + 1]);
        }
        for (j, lam) in z.lambda.iter().enumerate() {
            if j > k || is_zero_vec(lam) {
                continue;
            }
            let c = series_coeff(l, &[lam.as_slice()], &z.x, k - j, 0);
            axpy(&mut v, &-Q::one(), &c);
        }
        flow.push(v);
    }
    let passed = mc.iter().all(|v| is_zero_vec(v)) && flow.iter().all(|v| is_zero_vec(v));
    PathReport {
        passed,
        mc_residual: mc,
        flow_residual: flow,
        detail: None,
    }
}

/// Integrates `X′ = d^X λ`, `X(0) = x`, for constant `λ` of degree 1. The
/// solution is a polynomial; `bound` caps its degree.
pub fn gauge_flow<L: LInfinity + ?Sized>(l: &L, x: &[Q], lambda: &[Q], bound: usize) -> Result<GaugePath> {
    if !is_mc(l, x) {
        return Err(Error::NotMaurerCartan(format!(
            "flow start has residual {}",
            l.space().describe(&mc_residual(l, x))
        )));
    }
    if let Some(d) = l.space().vector_degree(lambda) {
        if d != 1 {
            return Err(Error::Degree(format!("gauge direction has degree {d}, expected 1")));
        }
    }
    let arity = l.max_arity().max(1);
    let cap = 4 * (bound + 2) * arity;
    let mut xs: Vec<Vector> = vec![x.to_vec()];
    loop {
        let k = xs.len() - 1;
        // X is exact at degree k when every higher coefficient of the
        // right-hand side vanishes
        let exact = (k..=k * arity + 1).all(|j| is_zero_vec(&series_coeff(l, &[lambda], &xs, j, 0)));
        if exact {
            break;
        }
        if k >= cap {
            return Err(Error::WindowOverflow(format!(
                "gauge flow is not polynomial of degree <= {cap}"
            )));
        }
        let c = series_coeff(l, &[lambda], &xs, k, 0);
        let next: Vector = c.iter().map(|v| v / q(k as i64 + 1)).collect();
        xs.push(next);
    }
    while xs.len() > 1 && is_zero_vec(xs.last().unwrap()) {
        xs.pop();
    }
    let needed = xs.len() - 1;
    if needed > bound {
        return Err(Error::WindowOverflow(format!(
            "gauge flow needs polynomial degree {needed}, bound is {bound}"
        )));
    }
    let path = GaugePath {
        x: xs,
        lambda: vec![lambda.to_vec()],
    };
    let report = path_check(l, &path);
    if !report.passed {
        return Err(Error::validation("gauge path", "integrated flow fails the path equations"));
    }
    Ok(path)
}

/// Checks a chain of paths joining `x` to `y`.
pub fn verify_chain<L: LInfinity + ?Sized>(l: &L, x: &[Q], y: &[Q], paths: &[GaugePath]) -> Result<()> {
    let mut cur = x.to_vec();
    for (k, p) in paths.iter().enumerate() {
        let r = path_check(l, p);
        if !r.passed {
            return Err(Error::validation(
                "gauge path",
                format!("segment {k} fails: {}", r.detail.unwrap_or_else(|| "nonzero residual".into())),
            ));
        }
        if p.start() != cur {
            return Err(Error::validation("gauge path", format!("segment {k} does not start where the previous ended")));
        }
        cur = p.end();
    }
    if cur != y {
        return Err(Error::validation("gauge path", "chain does not end at the target"));
    }
    Ok(())
}

/// Data of one stage of the support filtration: the admissible image of
/// gauge directions inside the maps on the `C`-degree `p` part.
struct Stage {
    /// Carrier indices of `Hom_0` on `C_p`.
    rows: Vec<usize>,
    /// Carrier indices of `Hom_1` on `C_{≤p}`.
    cols: Vec<usize>,
    /// Admissible directions (columns of `Hom_1` coordinates) and their images.
    directions: Vec<Vector>,
    images: Vec<Vector>,
}

fn source_degree<L: LInfinity>(h: &ConvolutionAlgebra<L>, i: usize) -> i64 {
    h.source.space.degree(h.split(i).0)
}

fn stage<L: LInfinity>(h: &ConvolutionAlgebra<L>, cur: &[Q], p: i64) -> Stage {
    let lower: Vec<usize> = h.degree_indices(0).into_iter().filter(|&i| source_degree(h, i) < p).collect();
    let rows: Vec<usize> = h.degree_indices(0).into_iter().filter(|&i| source_degree(h, i) == p).collect();
    let cols: Vec<usize> = h.degree_indices(1).into_iter().filter(|&i| source_degree(h, i) <= p).collect();
    let t = Twisted::new(h, cur.to_vec());
    let dcols: Vec<Vector> = cols.iter().map(|&j| t.bracket_basis(&[j])).collect();
    let m = Matrix::from_cols(&dcols, h.dim());
    let m_lower = m.select(&lower, &(0..cols.len()).collect::<Vec<_>>());
    let m_stage = m.select(&rows, &(0..cols.len()).collect::<Vec<_>>());
    let directions = m_lower.kernel();
    let images = directions.iter().map(|k| m_stage.mul_vec(k)).collect();
    Stage {
        rows,
        cols,
        directions,
        images,
    }
}

impl Stage {
    fn restrict(&self, v: &[Q]) -> Vector {
        self.rows.iter().map(|&i| v[i].clone()).collect()
    }

    /// A gauge direction whose first-order effect on `C_p` is `delta`.
    fn solve(&self, delta: &[Q], dim: usize) -> Option<Vector> {
        if self.images.is_empty() {
            return if is_zero_vec(delta) { Some(zero_vec(dim)) } else { None };
        }
        let a = Matrix::from_cols(&self.images, self.rows.len());
        let coef = a.solve(delta)?;
        let mut lam = zero_vec(dim);
        for (c, k) in coef.iter().zip(&self.directions) {
            for (j, x) in support(k) {
                lam[self.cols[j]] += c * x;
            }
        }
        Some(lam)
    }

    /// Reduced row echelon basis of the admissible image.
    fn image_echelon(&self) -> (Matrix, Vec<usize>) {
        let m = Matrix::from_rows(self.images.clone(), self.rows.len());
        let e = m.echelon();
        (e.reduced, e.pivots)
    }

    /// Functional on `Hom_0(C_p)` killing the admissible image but not `delta`.
    fn separating_functional(&self, delta: &[Q]) -> Option<Vector> {
        let m = Matrix::from_rows(self.images.clone(), self.rows.len());
        m.kernel().into_iter().find(|phi| !dot(phi, delta).is_zero())
    }
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Proof that two MC elements are not gauge equivalent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionWitness {
    /// The `C`-degree of the stage at which the search got stuck.
    pub stage: i64,
    /// Gauge moves from the first element to `base`.
    pub approach: Vec<GaugePath>,
    /// Agrees with the second element on `C` below the stage.
    pub base: Vector,
    /// Difference on the stage, as a carrier vector.
    pub discrepancy: Vector,
    /// Functional on the carrier vanishing on every admissible gauge image
    /// and nonzero on the discrepancy.
    pub functional: Vector,
    /// When the brackets vanish on both elements, `x − y` is an `l_1`-cycle
    /// that is not a boundary; it is recorded here.
    pub homology_class: Option<Vector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaugeOutcome {
    Equal(Vec<GaugePath>),
    Distinct(Box<ObstructionWitness>),
    Unknown(String),
}

fn source_degrees<L: LInfinity>(h: &ConvolutionAlgebra<L>) -> Vec<i64> {
    let mut ds: Vec<i64> = h.source.space.degrees().to_vec();
    ds.sort_unstable();
    ds.dedup();
    ds
}

fn check_inputs<L: LInfinity>(h: &ConvolutionAlgebra<L>, xs: &[&[Q]]) -> Result<()> {
    for x in xs {
        if x.len() != h.dim() {
            return Err(Error::Shape(format!("element has length {}, expected {}", x.len(), h.dim())));
        }
        if let Some(d) = h.space().vector_degree(x) {
            if d != 0 {
                return Err(Error::Degree(format!("MC candidate has degree {d}")));
            }
        }
        if !h.is_mc(x) {
            return Err(Error::NotMaurerCartan(format!(
                "residual {}",
                h.space().describe(&h.mc_residual(x))
            )));
        }
    }
    Ok(())
}

fn embed(rows: &[usize], v: &[Q], dim: usize) -> Vector {
    let mut out = zero_vec(dim);
    for (&i, x) in rows.iter().zip(v) {
        out[i] = x.clone();
    }
    out
}

/// Decides gauge equivalence of two MC elements by moving `x` towards `y`
/// one `C`-degree at a time.
pub fn gauge_equivalent<L: LInfinity>(h: &ConvolutionAlgebra<L>, x: &[Q], y: &[Q], bound: usize) -> Result<GaugeOutcome> {
    check_inputs(h, &[x, y])?;
    let dim = h.dim();
    if x == y {
        return Ok(GaugeOutcome::Equal(vec![GaugePath::constant(x.to_vec())]));
    }
    let mut cur = x.to_vec();
    let mut paths = Vec::new();
    for p in source_degrees(h) {
        let st = stage(h, &cur, p);
        let delta = sub_vec(&st.restrict(y), &st.restrict(&cur));
        if is_zero_vec(&delta) {
            continue;
        }
        match st.solve(&delta, dim) {
            Some(lam) => {
                let path = match gauge_flow(h, &cur, &lam, bound) {
                    Ok(p) => p,
                    Err(Error::WindowOverflow(m)) => return Ok(GaugeOutcome::Unknown(m)),
                    Err(e) => return Err(e),
                };
                cur = path.end();
                paths.push(path);
            }
            None => {
                let phi = st
                    .separating_functional(&delta)
                    .expect("a vector outside a subspace is separated by a functional");
                let diff = sub_vec(x, y);
                let d = h.ell1();
                let abelian = d == Twisted::new(h, x.to_vec()).ell1() && d == Twisted::new(h, y.to_vec()).ell1();
                let homology_class = if abelian && !in_boundaries(h, &diff) { Some(diff) } else { None };
                return Ok(GaugeOutcome::Distinct(Box::new(ObstructionWitness {
                    stage: p,
                    approach: paths,
                    base: cur,
                    discrepancy: embed(&st.rows, &delta, dim),
                    functional: embed(&st.rows, &phi, dim),
                    homology_class,
                })));
            }
        }
    }
    if cur != y {
        return Err(Error::validation("gauge search", "stages exhausted without reaching the target"));
    }
    verify_chain(h, x, y, &paths)?;
    Ok(GaugeOutcome::Equal(paths))
}

fn in_boundaries<L: LInfinity>(h: &ConvolutionAlgebra<L>, v: &[Q]) -> bool {
    let cols = h.degree_indices(1);
    let d = h.ell1();
    let m = d.select(&(0..h.dim()).collect::<Vec<_>>(), &cols);
    m.solve(v).is_some()
}

/// Re-derives a Distinct verdict from its witness.
pub fn verify_witness<L: LInfinity>(h: &ConvolutionAlgebra<L>, x: &[Q], y: &[Q], w: &ObstructionWitness) -> Result<()> {
    check_inputs(h, &[x, y])?;
    verify_chain(h, x, &w.base, &w.approach)?;
    for i in h.degree_indices(0) {
        let p = source_degree(h, i);
        if p < w.stage && w.base[i] != y[i] {
            return Err(Error::validation("obstruction witness", "base differs from the target below the stage"));
        }
    }
    let st = stage(h, &w.base, w.stage);
    let delta = sub_vec(&st.restrict(y), &st.restrict(&w.base));
    if embed(&st.rows, &delta, h.dim()) != w.discrepancy {
        return Err(Error::validation("obstruction witness", "recorded discrepancy is wrong"));
    }
    let phi = st.restrict(&w.functional);
    if embed(&st.rows, &phi, h.dim()) != w.functional {
        return Err(Error::validation("obstruction witness", "functional is not supported on the stage"));
    }
    if st.images.iter().any(|v| !dot(&phi, v).is_zero()) {
        return Err(Error::validation("obstruction witness", "functional does not vanish on gauge images"));
    }
    if dot(&phi, &delta).is_zero() {
        return Err(Error::validation("obstruction witness", "functional vanishes on the discrepancy"));
    }
    if let Some(c) = &w.homology_class {
        if !is_zero_vec(&h.ell1().mul_vec(c)) || in_boundaries(h, c) {
            return Err(Error::validation("obstruction witness", "recorded class is not a nonzero homology class"));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliClass {
    pub representative: Vector,
    /// Gauge moves from the input to the representative.
    pub paths: Vec<GaugePath>,
}

/// Canonical representative of the gauge class of `x`: at each stage the
/// `C_p` part is reduced modulo the echelon basis of the admissible image.
pub fn moduli_normal_form<L: LInfinity>(h: &ConvolutionAlgebra<L>, x: &[Q], bound: usize) -> Result<ModuliClass> {
    check_inputs(h, &[x])?;
    let dim = h.dim();
    let mut cur = x.to_vec();
    let mut paths = Vec::new();
    for p in source_degrees(h) {
        let st = stage(h, &cur, p);
        let v = st.restrict(&cur);
        let (ech, pivots) = st.image_echelon();
        let mut red = v.clone();
        for (r, &pc) in pivots.iter().enumerate() {
            let c = red[pc].clone();
            if !c.is_zero() {
                axpy(&mut red, &-c, ech.row(r));
            }
        }
        let delta = sub_vec(&red, &v);
        if is_zero_vec(&delta) {
            continue;
        }
        let lam = st.solve(&delta, dim).expect("reduction stays in the admissible image");
        let path = gauge_flow(h, &cur, &lam, bound)?;
        cur = path.end();
        paths.push(path);
    }
    Ok(ModuliClass {
        representative: cur,
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::CdgCoalgebra;
    use crate::graded::GradedSpace;
    use crate::interval::ExtendedAlgebra;
    use crate::linfty::TableLInfinity;

    fn s2_model() -> TableLInfinity {
        let space = GradedSpace::from_pairs(&[("x", 2), ("y", 3)]);
        TableLInfinity::new(space, Matrix::zeros(2, 2), vec![(vec![0, 0], vec![q(0), q(1)])]).unwrap()
    }

    #[test]
    fn weights() {
        let w = weighted_multisets(3, 2, 2);
        assert_eq!(w, vec![(vec![0, 2], q(1)), (vec![1, 1], crate::scalar::q_frac(1, 2))]);
    }

    #[test]
    fn s3_to_s2_classes_are_distinct() {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::sphere(3), s2_model());
        let mut x = zero_vec(h.dim());
        let mut y = zero_vec(h.dim());
        x[h.index(0, 1)] = q(2);
        y[h.index(0, 1)] = q(5);
        match gauge_equivalent(&h, &x, &y, 4).unwrap() {
            GaugeOutcome::Distinct(w) => {
                verify_witness(&h, &x, &y, &w).unwrap();
                assert!(w.homology_class.is_some());
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(gauge_equivalent(&h, &x, &x, 4).unwrap(), GaugeOutcome::Equal(_)));
    }

    /// `x`(2), `w`(3), `u`(3), `v`(4) with `l_2(x,x) = w`, `l_2(x,u) = v`.
    fn two_cell_model() -> TableLInfinity {
        let space = GradedSpace::from_pairs(&[("x", 2), ("w", 3), ("u", 3), ("v", 4)]);
        TableLInfinity::new(
            space,
            Matrix::zeros(4, 4),
            vec![
                (vec![0, 0], vec![q(0), q(1), q(0), q(0)]),
                (vec![0, 2], vec![q(0), q(0), q(0), q(1)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn flow_path_is_mc_in_extension() {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::sphere_product(2, 2), two_cell_model());
        let mut x = zero_vec(h.dim());
        x[h.index(0, 0)] = q(1);
        x[h.index(2, 3)] = q(3);
        assert!(h.is_mc(&x));
        let mut lam = zero_vec(h.dim());
        lam[h.index(1, 2)] = q(2);
        let path = gauge_flow(&h, &x, &lam, 4).unwrap();
        let ext = ExtendedAlgebra::new(&h, 3);
        let z = ext.pack(&path.x, &path.lambda).unwrap();
        assert!(is_mc(&ext, &z));
        assert_ne!(path.end(), x);
        let nf = moduli_normal_form(&h, &x, 4).unwrap();
        let nf2 = moduli_normal_form(&h, &path.end(), 4).unwrap();
        assert_eq!(nf.representative, nf2.representative);
        assert_eq!(moduli_normal_form(&h, &nf.representative, 4).unwrap().representative, nf.representative);
        match gauge_equivalent(&h, &x, &path.end(), 4).unwrap() {
            GaugeOutcome::Equal(paths) => verify_chain(&h, &x, &path.end(), &paths).unwrap(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_sign_flow_fails_in_extension() {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::sphere_product(2, 2), two_cell_model());
        let mut x = zero_vec(h.dim());
        x[h.index(0, 0)] = q(1);
        let mut lam = zero_vec(h.dim());
        lam[h.index(1, 2)] = q(1);
        let mut path = gauge_flow(&h, &x, &lam, 4).unwrap();
        path.lambda[0] = crate::linalg::scale_vec(&q(-1), &path.lambda[0]);
        assert!(!path_check(&h, &path).passed);
        let ext = ExtendedAlgebra::new(&h, 3);
        let z = ext.pack(&path.x, &path.lambda).unwrap();
        assert!(!is_mc(&ext, &z));
    }
}
