//! Polynomial forms on the interval and extension of scalars `A ⊗ L`.
//!
//! `Ω₁` is truncated to the quotient by the dg ideal `(t^{D+1}, t^D dt)`, so
//! the truncation is still a commutative dg algebra and `A ⊗ L` is an honest
//! L∞-algebra. Homologically `t` has degree 0 and `dt` degree −1.

use num_traits::Zero;

use crate::graded::GradedSpace;
use crate::linalg::{support, zero_vec, Vector};
use crate::linfty::LInfinity;
use crate::scalar::{q, sign, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    /// `t^k`
    Poly(usize),
    /// `t^k dt`
    PolyDt(usize),
}

impl Form {
    pub fn degree(self) -> i64 {
        match self {
            Form::Poly(_) => 0,
            Form::PolyDt(_) => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalForms {
    pub bound: usize,
    pub basis: Vec<Form>,
}

impl IntervalForms {
    pub fn new(bound: usize) -> Self {
        let mut basis: Vec<Form> = (0..=bound).map(Form::Poly).collect();
        basis.extend((0..bound).map(Form::PolyDt));
        IntervalForms { bound, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index(&self, f: Form) -> Option<usize> {
        match f {
            Form::Poly(k) if k <= self.bound => Some(k),
            Form::PolyDt(k) if k < self.bound => Some(self.bound + 1 + k),
            _ => None,
        }
    }

    /// Product of basis forms; `None` when it lies in the truncation ideal
    /// or vanishes.
    pub fn mul(&self, a: Form, b: Form) -> Option<Form> {
        let f = match (a, b) {
            (Form::Poly(i), Form::Poly(j)) => Form::Poly(i + j),
            (Form::Poly(i), Form::PolyDt(j)) | (Form::PolyDt(j), Form::Poly(i)) => Form::PolyDt(i + j),
            (Form::PolyDt(_), Form::PolyDt(_)) => return None,
        };
        self.index(f).map(|_| f)
    }

    /// `d(t^k) = k t^{k−1} dt`.
    pub fn d(&self, a: Form) -> Option<(Form, Q)> {
        match a {
            Form::Poly(k) if k > 0 => Some((Form::PolyDt(k - 1), q(k as i64))),
            _ => None,
        }
    }
}

/// `A ⊗ L` with `A` the truncated interval forms; basis `a ⊗ x`, index
/// `a * dim L + x`. Brackets:
///
/// * `l_1(a⊗x) = da⊗x + (−1)^{|a|} a⊗l_1 x`
/// * `l_n(a_1⊗x_1, …) = (−1)^{|a_1⋯a_n|} ε · a_1⋯a_n ⊗ l_n(x_1, …, x_n)`, with
///   `ε` the Koszul sign of moving every `a_i` to the left past `x_j, j < i`.
pub struct ExtendedAlgebra<'a, L: LInfinity + ?Sized> {
    pub base: &'a L,
    pub forms: IntervalForms,
    space: GradedSpace,
}

impl<'a, L: LInfinity + ?Sized> ExtendedAlgebra<'a, L> {
    pub fn new(base: &'a L, bound: usize) -> Self {
        let forms = IntervalForms::new(bound);
        let bs = base.space();
        let mut basis = Vec::with_capacity(forms.dim() * bs.dim());
        for f in &forms.basis {
            let label = match f {
                Form::Poly(k) => format!("t^{k}"),
                Form::PolyDt(k) => format!("t^{k}dt"),
            };
            for x in 0..bs.dim() {
                basis.push((format!("{label}*{}", bs.name(x)), f.degree() + bs.degree(x)));
            }
        }
        let space = GradedSpace::new(basis).expect("distinct names");
        ExtendedAlgebra { base, forms, space }
    }

    pub fn index(&self, a: Form, x: usize) -> Option<usize> {
        self.forms.index(a).map(|i| i * self.base.dim() + x)
    }

    fn split(&self, i: usize) -> (Form, usize) {
        let n = self.base.dim();
        (self.forms.basis[i / n], i % n)
    }

    /// Packs polynomial components `X(t) = Σ X_k t^k` and
    /// `Λ(t) = Σ Λ_k t^k` into `X(t) + dt·Λ(t)`.
    pub fn pack(&self, x: &[Vector], lambda: &[Vector]) -> Option<Vector> {
        let mut out = zero_vec(self.dim());
        for (k, v) in x.iter().enumerate() {
            for (j, c) in support(v) {
                out[self.index(Form::Poly(k), j)?] += c;
            }
        }
        for (k, v) in lambda.iter().enumerate() {
            for (j, c) in support(v) {
                out[self.index(Form::PolyDt(k), j)?] += c;
            }
        }
        Some(out)
    }
}

impl<L: LInfinity + ?Sized> LInfinity for ExtendedAlgebra<'_, L> {
    fn space(&self) -> &GradedSpace {
        &self.space
    }

    fn max_arity(&self) -> usize {
        self.base.max_arity()
    }

    fn bracket_basis(&self, idx: &[usize]) -> Vector {
        let mut out = zero_vec(self.dim());
        let parts: Vec<(Form, usize)> = idx.iter().map(|&i| self.split(i)).collect();
        if parts.len() == 1 {
            let (a, x) = parts[0];
            if let Some((da, c)) = self.forms.d(a) {
                if let Some(i) = self.index(da, x) {
                    out[i] += c;
                }
            }
            let lx = self.base.bracket_basis(&[x]);
            let s = sign(a.degree() % 2 != 0);
            for (y, c) in support(&lx) {
                if let Some(i) = self.index(a, y) {
                    out[i] += &s * c;
                }
            }
            return out;
        }
        let mut prod = Form::Poly(0);
        let mut odd = false;
        let mut passed = 0i64;
        for &(a, x) in &parts {
            match self.forms.mul(prod, a) {
                Some(p) => prod = p,
                None => return out,
            }
            if a.degree() % 2 != 0 {
                odd ^= true;
                if passed % 2 != 0 {
                    odd ^= true;
                }
            }
            passed += self.base.degree(x);
        }
        let xs: Vec<usize> = parts.iter().map(|p| p.1).collect();
        let v = self.base.bracket_basis(&xs);
        let s = sign(odd);
        for (y, c) in support(&v) {
            if let Some(i) = self.index(prod, y) {
                out[i] += &s * c;
            }
        }
        out
    }
}

/// Evaluates a vector-valued polynomial `Σ c_k t^k` at `t`.
pub fn poly_eval(coeffs: &[Vector], t: &Q, dim: usize) -> Vector {
    let mut out = zero_vec(dim);
    let mut power = q(1);
    for c in coeffs {
        for (i, x) in support(c) {
            out[i] += &power * x;
        }
        power *= t;
    }
    out
}

pub fn is_zero_poly(coeffs: &[Vector]) -> bool {
    coeffs.iter().all(|v| v.iter().all(|x| x.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::CdgCoalgebra;
    use crate::convolution::ConvolutionAlgebra;
    use crate::linalg::Matrix;
    use crate::linfty::{validate_linfty, TableLInfinity};
    use crate::par::Exec;

    #[test]
    fn truncation_is_a_dg_ideal() {
        let a = IntervalForms::new(3);
        assert_eq!(a.dim(), 7);
        assert_eq!(a.mul(Form::Poly(2), Form::Poly(1)), Some(Form::Poly(3)));
        assert_eq!(a.mul(Form::Poly(2), Form::PolyDt(1)), None);
        assert_eq!(a.d(Form::Poly(3)), Some((Form::PolyDt(2), q(3))));
    }

    #[test]
    fn extension_satisfies_jacobi() {
        let space = GradedSpace::from_pairs(&[("x", 2), ("y", 3)]);
        let l = TableLInfinity::new(space, Matrix::zeros(2, 2), vec![(vec![0, 0], vec![q(0), q(1)])]).unwrap();
        let h = ConvolutionAlgebra::new(CdgCoalgebra::cp2(), l);
        let ext = ExtendedAlgebra::new(&h, 2);
        validate_linfty(&ext, 3, Exec::Parallel).unwrap();
    }
}
