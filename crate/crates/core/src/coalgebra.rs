//! Conilpotent cocommutative dg coalgebras with reduced coproduct.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graded::GradedSpace;
use crate::linalg::Matrix;
use crate::scalar::{q, sign, Q};

/// Sparse element of a tensor power: index tuple ↦ coefficient.
pub type Tensor = BTreeMap<Vec<usize>, Q>;

pub fn tensor_add(t: &mut Tensor, key: Vec<usize>, c: Q) {
    if c.is_zero() {
        return;
    }
    match t.get_mut(&key) {
        Some(e) => {
            *e += c;
            if e.is_zero() {
                t.remove(&key);
            }
        }
        None => {
            t.insert(key, c);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgCoalgebra {
    pub space: GradedSpace,
    pub d: Matrix,
    /// Reduced coproduct of each basis element.
    pub delta: Vec<Tensor>,
}

impl CdgCoalgebra {
    /// Builds the coalgebra without validating it; see [`validate_cdgc`].
    pub fn new(space: GradedSpace, d: Matrix, delta: Vec<Tensor>) -> Result<Self> {
        let n = space.dim();
        if d.rows() != n || d.cols() != n {
            return Err(Error::Shape(format!("differential must be {n}x{n}")));
        }
        if delta.len() != n {
            return Err(Error::Shape(format!("coproduct needs {n} entries")));
        }
        for (c, t) in delta.iter().enumerate() {
            for k in t.keys() {
                if k.len() != 2 || k.iter().any(|&i| i >= n) {
                    return Err(Error::Shape(format!(
                        "coproduct of `{}` has a malformed term",
                        space.name(c)
                    )));
                }
            }
        }
        Ok(CdgCoalgebra { space, d, delta })
    }

    /// Zero differential, zero coproduct.
    pub fn trivial(space: GradedSpace) -> Self {
        let n = space.dim();
        CdgCoalgebra {
            space,
            d: Matrix::zeros(n, n),
            delta: vec![Tensor::new(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Reduced homology model of the sphere `S^n`.
    pub fn sphere(n: i64) -> Self {
        Self::trivial(GradedSpace::from_pairs(&[("c", n)]))
    }

    /// `a` (2), `b` (4), `Δb = a⊗a`.
    pub fn cp2() -> Self {
        let mut c = Self::trivial(GradedSpace::from_pairs(&[("a", 2), ("b", 4)]));
        c.delta[1].insert(vec![0, 0], q(1));
        c
    }

    /// Reduced homology of `S^p × S^q`: `a`, `b`, `ab` with
    /// `Δ(ab) = a⊗b + (−1)^{pq} b⊗a`.
    pub fn sphere_product(p: i64, qd: i64) -> Self {
        let mut c = Self::trivial(GradedSpace::from_pairs(&[("a", p), ("b", qd), ("ab", p + qd)]));
        c.delta[2].insert(vec![0, 1], q(1));
        tensor_add(&mut c.delta[2], vec![1, 0], sign(p * qd % 2 != 0));
        c
    }

    /// Reduced homology of a wedge of spheres (all coproducts vanish).
    pub fn sphere_wedge(degrees: &[i64]) -> Self {
        let basis: Vec<(String, i64)> = degrees
            .iter()
            .enumerate()
            .map(|(k, &d)| (format!("c{}", k + 1), d))
            .collect();
        Self::trivial(GradedSpace::new(basis).expect("distinct names"))
    }

    /// `Δ^{(n)}(c)`, right-normed: `Δ^{(n)} = (id ⊗ Δ^{(n−1)}) ∘ Δ`.
    pub fn iterated(&self, c: usize, n: usize) -> Tensor {
        let mut t = Tensor::new();
        match n {
            0 => {}
            1 => {
                t.insert(vec![c], q(1));
            }
            _ => {
                for (k, x) in &self.delta[c] {
                    for (rest, y) in self.iterated(k[1], n - 1) {
                        let mut key = vec![k[0]];
                        key.extend(rest);
                        tensor_add(&mut t, key, x * &y);
                    }
                }
            }
        }
        t
    }

    /// Largest `n` for which some `Δ^{(n)}` is nonzero.
    pub fn top_arity(&self) -> usize {
        let mut n = 1;
        while (0..self.dim()).any(|c| !self.iterated(c, n + 1).is_empty()) {
            n += 1;
        }
        n
    }

    /// Image of a vector under Δ, as a tensor.
    pub fn delta_vec(&self, v: &[Q]) -> Tensor {
        let mut t = Tensor::new();
        for (c, x) in crate::linalg::support(v) {
            for (k, y) in &self.delta[c] {
                tensor_add(&mut t, k.clone(), x * y);
            }
        }
        t
    }
}

fn describe_tensor(space: &GradedSpace, t: &Tensor) -> String {
    if t.is_empty() {
        return "0".into();
    }
    t.iter()
        .map(|(k, c)| {
            let names: Vec<&str> = k.iter().map(|&i| space.name(i)).collect();
            format!("{}*{}", crate::scalar::format_q(c), names.join("⊗"))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Checks 1-reducedness, degrees, `d² = 0`, coassociativity,
/// cocommutativity and the coderivation property, reporting the first
/// failing identity together with the offending basis element.
pub fn validate_cdgc(c: &CdgCoalgebra) -> Result<()> {
    let s = &c.space;
    let n = c.dim();
    for i in 0..n {
        if s.degree(i) < 2 {
            return Err(Error::validation(
                "1-reduced",
                format!("`{}` has degree {} < 2", s.name(i), s.degree(i)),
            ));
        }
    }
    crate::complex::ChainComplex::new(s.clone(), c.d.clone())?;
    for (x, t) in c.delta.iter().enumerate() {
        for k in t.keys() {
            if s.degree(k[0]) + s.degree(k[1]) != s.degree(x) {
                return Err(Error::Degree(format!(
                    "coproduct of `{}` contains {}⊗{} of the wrong degree",
                    s.name(x),
                    s.name(k[0]),
                    s.name(k[1])
                )));
            }
        }
    }
    for x in 0..n {
        // coassociativity
        let mut left = Tensor::new();
        let mut right = Tensor::new();
        for (k, a) in &c.delta[x] {
            for (k2, b) in &c.delta[k[0]] {
                tensor_add(&mut left, vec![k2[0], k2[1], k[1]], a * b);
            }
            for (k2, b) in &c.delta[k[1]] {
                tensor_add(&mut right, vec![k[0], k2[0], k2[1]], a * b);
            }
        }
        if left != right {
            return Err(Error::validation(
                "coassociativity",
                format!(
                    "on `{}`: (Δ⊗1)Δ = {} but (1⊗Δ)Δ = {}",
                    s.name(x),
                    describe_tensor(s, &left),
                    describe_tensor(s, &right)
                ),
            ));
        }
        // cocommutativity
        let mut swapped = Tensor::new();
        for (k, a) in &c.delta[x] {
            let odd = s.degree(k[0]) % 2 != 0 && s.degree(k[1]) % 2 != 0;
            tensor_add(&mut swapped, vec![k[1], k[0]], sign(odd) * a);
        }
        if swapped != c.delta[x] {
            return Err(Error::validation(
                "cocommutativity",
                format!(
                    "on `{}`: Δ = {} but the Koszul swap gives {}",
                    s.name(x),
                    describe_tensor(s, &c.delta[x]),
                    describe_tensor(s, &swapped)
                ),
            ));
        }
        // coderivation: Δ d = (d⊗1 + 1⊗d) Δ
        let dx = c.d.col(x);
        let lhs = c.delta_vec(&dx);
        let mut rhs = Tensor::new();
        for (k, a) in &c.delta[x] {
            for r in 0..n {
                let e = c.d.get(r, k[0]);
                if !e.is_zero() {
                    tensor_add(&mut rhs, vec![r, k[1]], a * e);
                }
                let e = c.d.get(r, k[1]);
                if !e.is_zero() {
                    let sg = sign(s.degree(k[0]) % 2 != 0);
                    tensor_add(&mut rhs, vec![k[0], r], sg * a * e);
                }
            }
        }
        if lhs != rhs {
            return Err(Error::validation(
                "coderivation",
                format!(
                    "on `{}`: Δd = {} but (d⊗1+1⊗d)Δ = {}",
                    s.name(x),
                    describe_tensor(s, &lhs),
                    describe_tensor(s, &rhs)
                ),
            ));
        }
    }
    Ok(())
}

/// Checks that a degree-0 map `f: C → D` commutes with `d` and `Δ`.
pub fn check_coalgebra_map(f: &Matrix, c: &CdgCoalgebra, d: &CdgCoalgebra) -> Result<()> {
    if f.rows() != d.dim() || f.cols() != c.dim() {
        return Err(Error::Shape("coalgebra map has wrong shape".into()));
    }
    for i in 0..f.rows() {
        for j in 0..f.cols() {
            if !f.get(i, j).is_zero() && d.space.degree(i) != c.space.degree(j) {
                return Err(Error::Degree(format!("map entry [{i}][{j}] is not of degree 0")));
            }
        }
    }
    if f.mul(&c.d) != d.d.mul(f) {
        return Err(Error::InvalidMorphism("does not commute with the differentials".into()));
    }
    for x in 0..c.dim() {
        let lhs = d.delta_vec(&f.col(x));
        let mut rhs = Tensor::new();
        for (k, a) in &c.delta[x] {
            for r in 0..d.dim() {
                let e1 = f.get(r, k[0]);
                if e1.is_zero() {
                    continue;
                }
                for t in 0..d.dim() {
                    let e2 = f.get(t, k[1]);
                    if !e2.is_zero() {
                        tensor_add(&mut rhs, vec![r, t], a * e1 * e2);
                    }
                }
            }
        }
        if lhs != rhs {
            return Err(Error::InvalidMorphism(format!(
                "does not commute with the coproduct on `{}`",
                c.space.name(x)
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_models_validate() {
        validate_cdgc(&CdgCoalgebra::sphere(3)).unwrap();
        validate_cdgc(&CdgCoalgebra::cp2()).unwrap();
        validate_cdgc(&CdgCoalgebra::sphere_product(2, 2)).unwrap();
        validate_cdgc(&CdgCoalgebra::sphere_product(3, 3)).unwrap();
        validate_cdgc(&CdgCoalgebra::sphere_wedge(&[2, 3])).unwrap();
    }

    #[test]
    fn antisymmetrized_coproduct_fails_cocommutativity() {
        let mut c = CdgCoalgebra::sphere_product(2, 2);
        c.delta[2].insert(vec![1, 0], q(-1));
        let err = validate_cdgc(&c).unwrap_err();
        assert!(matches!(err, Error::Validation { ref identity, .. } if identity == "cocommutativity"));
    }

    #[test]
    fn iterated_coproduct_of_cp2() {
        let c = CdgCoalgebra::cp2();
        assert_eq!(c.iterated(1, 2).len(), 1);
        assert!(c.iterated(1, 3).is_empty());
        assert_eq!(c.top_arity(), 2);
    }
}
