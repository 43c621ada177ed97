use proptest::prelude::*;

use mcalg_core::coalgebra::CdgCoalgebra;
use mcalg_core::convolution::ConvolutionAlgebra;
use mcalg_core::graded::GradedSpace;
use mcalg_core::interval::{ExtendedAlgebra, Form};
use mcalg_core::linalg::{add_vec, zero_vec, Matrix, Vector};
use mcalg_core::linfty::{check_strict_morphism, LInfinity, TableLInfinity};
use mcalg_core::mc_gauge::{gauge_equivalent, gauge_flow, moduli_normal_form, verify_chain, verify_witness, GaugeOutcome};
use mcalg_core::perm::{koszul_odd, permutations};
use mcalg_core::scalar::q;

fn two_cell() -> TableLInfinity {
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

/// Abelian target whose homology in the relevant degree is spanned by `z`;
/// `w` is the boundary of `v`.
fn abelian_with_boundary() -> TableLInfinity {
    let space = GradedSpace::from_pairs(&[("v", 3), ("w", 2), ("z", 2)]);
    let mut l1 = Matrix::zeros(3, 3);
    l1.set(1, 0, q(1));
    TableLInfinity::new(space, l1, vec![]).unwrap()
}

fn small_rational() -> impl Strategy<Value = i64> {
    -4i64..=4
}

fn fill(h: &impl LInfinity, indices: &[usize], values: &[i64]) -> Vector {
    let mut v = zero_vec(h.dim());
    for (&i, &c) in indices.iter().zip(values) {
        v[i] = q(c);
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_brackets_are_graded_symmetric(
        picks in proptest::collection::vec(0usize..1000, 3),
        sigma in 0usize..6,
    ) {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::sphere_product(2, 2), two_cell());
        let idx: Vec<usize> = picks.iter().map(|p| p % h.dim()).collect();
        let order = &permutations(3)[sigma];
        let degrees: Vec<i64> = idx.iter().map(|&i| h.degree(i)).collect();
        let permuted: Vec<usize> = order.iter().map(|&k| idx[k]).collect();
        let lhs = h.bracket_basis(&permuted);
        let rhs = h.bracket_basis(&idx);
        let rhs: Vector = if koszul_odd(&degrees, order) { rhs.iter().map(|x| -x).collect() } else { rhs };
        prop_assert_eq!(lhs, rhs);
        for pair in [[idx[0], idx[1]], [idx[1], idx[2]]] {
            let a = h.bracket_basis(&pair);
            let b = h.bracket_basis(&[pair[1], pair[0]]);
            let odd = h.degree(pair[0]) % 2 != 0 && h.degree(pair[1]) % 2 != 0;
            let b: Vector = if odd { b.iter().map(|x| -x).collect() } else { b };
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn normal_form_is_gauge_invariant(
        a in small_rational(),
        b in small_rational(),
        lambda in proptest::collection::vec(small_rational(), 8),
    ) {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::sphere_product(2, 2), two_cell());
        let mut x = zero_vec(h.dim());
        x[h.index(0, 0)] = q(a);
        x[h.index(2, 3)] = q(b);
        prop_assume!(h.is_mc(&x));
        let l = fill(&h, &h.degree_indices(1), &lambda);
        let y = gauge_flow(&h, &x, &l, 8).unwrap().end();
        prop_assert!(h.is_mc(&y));
        let nx = moduli_normal_form(&h, &x, 8).unwrap();
        let ny = moduli_normal_form(&h, &y, 8).unwrap();
        prop_assert_eq!(&nx.representative, &ny.representative);
        verify_chain(&h, &x, &nx.representative, &nx.paths).unwrap();
    }

    #[test]
    fn abelian_gauge_classes_are_homology_classes(
        xs in proptest::collection::vec(small_rational(), 2),
        ys in proptest::collection::vec(small_rational(), 2),
    ) {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::sphere(2), abelian_with_boundary());
        let w = h.index(0, 1);
        let z = h.index(0, 2);
        let x = fill(&h, &[w, z], &xs);
        let y = fill(&h, &[w, z], &ys);
        // every degree-0 element is an l1-cycle; z spans homology
        match gauge_equivalent(&h, &x, &y, 8).unwrap() {
            GaugeOutcome::Equal(paths) => {
                prop_assert_eq!(xs[1], ys[1]);
                verify_chain(&h, &x, &y, &paths).unwrap();
            }
            GaugeOutcome::Distinct(wit) => {
                prop_assert_ne!(xs[1], ys[1]);
                verify_witness(&h, &x, &y, &wit).unwrap();
            }
            GaugeOutcome::Unknown(r) => prop_assert!(false, "unknown: {}", r),
        }
    }

    #[test]
    fn evaluation_at_one_is_a_morphism_in_low_degree(
        xs in proptest::collection::vec(small_rational(), 4),
        ys in proptest::collection::vec(small_rational(), 4),
        kx in 0usize..=2,
        ky in 0usize..=2,
    ) {
        let base = two_cell();
        let ext = ExtendedAlgebra::new(&base, 6);
        let ev1 = evaluation(&ext, 1);
        let lift = |k: usize, v: &[i64]| {
            let mut out = zero_vec(ext.dim());
            for (i, &c) in v.iter().enumerate() {
                out[ext.index(Form::Poly(k), i).unwrap()] = q(c);
            }
            out
        };
        let (a, b) = (lift(kx, &xs), lift(ky, &ys));
        let lhs = ev1.mul_vec(&ext.bracket(&[&a, &b]));
        let rhs = base.bracket(&[&ev1.mul_vec(&a), &ev1.mul_vec(&b)]);
        prop_assert_eq!(lhs, rhs);
        let lhs = ev1.mul_vec(&ext.bracket(&[&a]));
        let rhs = base.bracket(&[&ev1.mul_vec(&a)]);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(add_vec(&ev1.mul_vec(&a), &ev1.mul_vec(&b)), ev1.mul_vec(&add_vec(&a, &b)));
    }
}

/// Evaluation `A ⊗ L → L` at `t ∈ {0, 1}`: `t^k ↦ t^k`, `dt ↦ 0`.
fn evaluation<L: LInfinity>(ext: &ExtendedAlgebra<'_, L>, t: i64) -> Matrix {
    let n = ext.base.dim();
    let mut m = Matrix::zeros(n, ext.dim());
    for k in 0..=ext.forms.bound {
        let c = if k == 0 { q(1) } else { q(t) };
        for x in 0..n {
            m.set(x, ext.index(Form::Poly(k), x).unwrap(), c.clone());
        }
    }
    m
}

#[test]
fn evaluation_at_zero_is_strict() {
    for base in [two_cell(), TableLInfinity::s2(), abelian_with_boundary()] {
        let ext = ExtendedAlgebra::new(&base, 3);
        check_strict_morphism(&evaluation(&ext, 0), &ext, &base, 3).unwrap();
    }
}

#[test]
fn bound_zero_extension_is_the_base() {
    let base = two_cell();
    let ext = ExtendedAlgebra::new(&base, 0);
    assert_eq!(ext.dim(), base.dim());
    for n in 1..=3 {
        for idx in mcalg_core::perm::multisets(base.dim(), n) {
            assert_eq!(ext.bracket_basis(&idx), base.bracket_basis(&idx), "{idx:?}");
        }
    }
    check_strict_morphism(&Matrix::identity(base.dim()), &ext, &base, 3).unwrap();
}
