//! Models of pointed mapping spaces: components as MC moduli and homotopy
//! groups of components as twisted homology.

use crate::bar_cobar::{bar, BarCoalgebra};
use crate::coalgebra::{check_coalgebra_map, validate_cdgc, CdgCoalgebra};
use crate::convolution::{ConvolutionAlgebra, TwistedHomology};
use crate::error::{Error, Result};
use crate::freelie::{free_lie_model, QuillenModel};
use crate::linalg::{unit_vec, Matrix, Vector};
use crate::linfty::LInfinity;
use crate::mc_gauge::{gauge_equivalent, moduli_normal_form, GaugeOutcome, ModuliClass};
use crate::perm::multisets;
use crate::poly::{solve, Poly};
use crate::scalar::{q, Q};

#[derive(Clone, Debug)]
pub enum SourceModel {
    Coalgebra(CdgCoalgebra),
    Quillen(QuillenModel),
}

/// For a Quillen-model source: the strict coalgebra on the generators and
/// its inclusion into the bar construction, when the differential has no
/// bracket part.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub strict: CdgCoalgebra,
    /// Coalgebra map `strict → C′`.
    pub map: Matrix,
}

pub struct MappingSpaceModel<L: LInfinity> {
    pub algebra: ConvolutionAlgebra<L>,
    pub bar: Option<BarCoalgebra>,
    pub comparison: Option<Comparison>,
    /// Degrees up to which the source model is exact.
    pub window: i64,
}

pub fn mapping_space_model<L: LInfinity>(source: &SourceModel, l: L, window: i64) -> Result<MappingSpaceModel<L>> {
    match source {
        SourceModel::Coalgebra(c) => {
            validate_cdgc(c)?;
            Ok(MappingSpaceModel {
                algebra: ConvolutionAlgebra::new(c.clone(), l),
                bar: None,
                comparison: None,
                window,
            })
        }
        SourceModel::Quillen(model) => {
            let fl = free_lie_model(model, window)?;
            let b = bar(&fl.table, window)?;
            validate_cdgc(&b.coalgebra)?;
            let comparison = strict_comparison(model, &fl.generator_index, &b);
            Ok(MappingSpaceModel {
                algebra: ConvolutionAlgebra::new(b.coalgebra.clone(), l),
                bar: Some(b),
                comparison,
                window,
            })
        }
    }
}

fn strict_comparison(model: &QuillenModel, gens: &[Option<usize>], b: &BarCoalgebra) -> Option<Comparison> {
    let n = model.generators.dim();
    let mut d = Matrix::zeros(n, n);
    for (g, terms) in model.delta.iter().enumerate() {
        for (word, c) in terms {
            if word.len() != 1 {
                return None;
            }
            d.add_to(word[0], g, c);
        }
    }
    let strict = CdgCoalgebra::new(model.generators.clone(), d, vec![Default::default(); n]).ok()?;
    validate_cdgc(&strict).ok()?;
    let mut map = Matrix::zeros(b.coalgebra.dim(), n);
    for (g, idx) in gens.iter().enumerate() {
        let letter = b.letter((*idx)?)?;
        map.set(letter, g, q(1));
    }
    check_coalgebra_map(&map, &strict, &b.coalgebra).ok()?;
    Some(Comparison { strict, map })
}

/// The MC equations as polynomials in the chosen degree-0 coordinates.
pub fn mc_equations<L: LInfinity>(h: &ConvolutionAlgebra<L>, vars: &[usize]) -> Vec<Poly> {
    let nv = vars.len();
    let mut eqs = vec![Poly::zero(); h.dim()];
    for n in 1..=h.max_arity() {
        for m in multisets(nv, n) {
            let idx: Vec<usize> = m.iter().map(|&k| vars[k]).collect();
            let v = h.bracket_basis(&idx);
            if v.iter().all(num_traits::Zero::is_zero) {
                continue;
            }
            let mut e = vec![0u32; nv];
            for &k in &m {
                e[k] += 1;
            }
            let mut w = Q::from_integer(1.into());
            for &k in &e {
                for r in 2..=k {
                    w /= q(r as i64);
                }
            }
            for (o, c) in crate::linalg::support(&v) {
                eqs[o].add_term(e.clone(), &w * c);
            }
        }
    }
    eqs.into_iter().filter(|p| !p.is_zero()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSummary {
    /// Carrier names of the free coordinates.
    pub free: Vec<String>,
    /// Each fixed coordinate with its value as a polynomial in the free ones.
    pub fixed: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct ComponentsReport {
    pub variables: Vec<usize>,
    pub branches: Vec<BranchSummary>,
    pub classes: Vec<ModuliClass>,
    /// Gauge comparisons between every pair of listed classes.
    pub separations: Vec<(usize, usize, GaugeOutcome)>,
    /// True when the solver described the full MC set of `Hom_0`.
    pub exhaustive: bool,
    /// True when free parameters were sampled rather than enumerated.
    pub sampled: bool,
}

fn render_poly(p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.terms
        .iter()
        .map(|(e, c)| {
            let mut s = crate::scalar::format_q(c);
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    s.push('*');
                    s.push_str(&names[k]);
                    if x > 1 {
                        s.push_str(&format!("^{x}"));
                    }
                }
            }
            s
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

const SAMPLES: [i64; 3] = [0, 1, 2];

/// Enumerates path components. `params` restricts the search to the given
/// degree-0 coordinates (all others zero); `None` searches all of `Hom_0`.
pub fn components<L: LInfinity>(h: &ConvolutionAlgebra<L>, params: Option<&[usize]>, bound: usize) -> Result<ComponentsReport> {
    let all = h.degree_indices(0);
    let vars: Vec<usize> = match params {
        Some(p) => {
            for &i in p {
                if !all.contains(&i) {
                    return Err(Error::Degree(format!("`{}` is not a degree-0 coordinate", h.space().name(i))));
                }
            }
            p.to_vec()
        }
        None => all.clone(),
    };
    let names: Vec<String> = vars.iter().map(|&i| h.space().name(i).to_string()).collect();
    let eqs = mc_equations(h, &vars);
    let sol = solve(&eqs, vars.len());
    let covers = vars.len() == all.len();
    let mut branches = Vec::new();
    let mut points: Vec<Vector> = Vec::new();
    let mut sampled = false;
    for br in &sol.branches {
        let free = br.free_variables();
        branches.push(BranchSummary {
            free: free.iter().map(|&k| names[k].clone()).collect(),
            fixed: br
                .values
                .iter()
                .enumerate()
                .filter_map(|(k, v)| v.as_ref().map(|p| (names[k].clone(), render_poly(p, &names))))
                .collect(),
        });
        let assignments: Vec<Vec<(usize, Q)>> = if free.is_empty() {
            vec![Vec::new()]
        } else {
            sampled = true;
            if 3usize.pow(free.len().min(8) as u32) <= 27 {
                let mut acc: Vec<Vec<(usize, Q)>> = vec![Vec::new()];
                for &v in &free {
                    acc = acc
                        .into_iter()
                        .flat_map(|a| {
                            SAMPLES.iter().map(move |&s| {
                                let mut a = a.clone();
                                a.push((v, q(s)));
                                a
                            })
                        })
                        .collect();
                }
                acc
            } else {
                SAMPLES.iter().map(|&s| free.iter().map(|&v| (v, q(s))).collect()).collect()
            }
        };
        for a in assignments {
            let coords = br.point(&a);
            let mut x = crate::linalg::zero_vec(h.dim());
            for (k, c) in coords.into_iter().enumerate() {
                x[vars[k]] = c;
            }
            if !h.is_mc(&x) {
                return Err(Error::validation("components", "solver produced a non-MC point"));
            }
            points.push(x);
        }
    }
    let mut classes: Vec<ModuliClass> = Vec::new();
    for x in &points {
        let nf = moduli_normal_form(h, x, bound)?;
        if !classes.iter().any(|c| c.representative == nf.representative) {
            classes.push(nf);
        }
    }
    let mut separations = Vec::new();
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            let r = gauge_equivalent(h, &classes[i].representative, &classes[j].representative, bound)?;
            separations.push((i, j, r));
        }
    }
    Ok(ComponentsReport {
        variables: vars,
        branches,
        classes,
        separations,
        exhaustive: sol.complete && covers,
        sampled,
    })
}

/// `π_n` of the component of `τ`.
pub fn pi_of_component<L: LInfinity>(h: &ConvolutionAlgebra<L>, tau: &[Q], n: i64) -> Result<TwistedHomology> {
    h.twisted_homology(tau, n)
}

/// Compares the moduli computed from a Quillen-model source with those of
/// its strict comparison coalgebra: every sampled class on the bar side is
/// pulled back, and the resulting sets of normal forms must coincide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BijectionReport {
    pub bar_classes: usize,
    pub strict_classes: usize,
    pub matched: bool,
}

pub fn moduli_bijection_check<L: LInfinity + Clone>(
    model: &MappingSpaceModel<L>,
    bound: usize,
) -> Result<BijectionReport> {
    let cmp = model
        .comparison
        .as_ref()
        .ok_or_else(|| Error::Unsupported("no strict comparison coalgebra for this source".into()))?;
    let strict = ConvolutionAlgebra::new(cmp.strict.clone(), model.algebra.target.clone());
    let pull = model.algebra.pullback(&cmp.map, &strict)?;
    let ours = components(&model.algebra, None, bound)?;
    let theirs = components(&strict, None, bound)?;
    let mut images = Vec::new();
    for c in &ours.classes {
        let y = pull.mul_vec(&c.representative);
        if !strict.is_mc(&y) {
            return Err(Error::validation("comparison", "pullback of an MC element is not MC"));
        }
        let nf = moduli_normal_form(&strict, &y, bound)?.representative;
        if images.contains(&nf) {
            return Ok(BijectionReport {
                bar_classes: ours.classes.len(),
                strict_classes: theirs.classes.len(),
                matched: false,
            });
        }
        images.push(nf);
    }
    let mut targets: Vec<Vector> = theirs.classes.iter().map(|c| c.representative.clone()).collect();
    images.sort();
    targets.sort();
    Ok(BijectionReport {
        bar_classes: ours.classes.len(),
        strict_classes: theirs.classes.len(),
        matched: images == targets,
    })
}

/// Basis vector helper for callers that address carrier coordinates by name.
pub fn carrier_vector<L: LInfinity>(h: &ConvolutionAlgebra<L>, terms: &[(&str, Q)]) -> Result<Vector> {
    let mut v = crate::linalg::zero_vec(h.dim());
    for (name, c) in terms {
        let i = h
            .space()
            .index_of(name)
            .ok_or_else(|| Error::parse(format!("element.{name}"), "unknown carrier basis element"))?;
        crate::linalg::axpy(&mut v, c, &unit_vec(h.dim(), i));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedSpace;
    use crate::linfty::TableLInfinity;

    fn s2_model() -> TableLInfinity {
        let space = GradedSpace::from_pairs(&[("x", 2), ("y", 3)]);
        TableLInfinity::new(space, Matrix::zeros(2, 2), vec![(vec![0, 0], vec![q(0), q(1)])]).unwrap()
    }

    #[test]
    fn cp2_has_one_component() {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::cp2(), s2_model());
        let r = components(&h, None, 4).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.classes.len(), 1);
    }

    #[test]
    fn s3_components_are_a_line() {
        let h = ConvolutionAlgebra::new(CdgCoalgebra::sphere(3), s2_model());
        let r = components(&h, None, 4).unwrap();
        assert!(r.exhaustive && r.sampled);
        assert_eq!(r.classes.len(), 3);
        assert!(r.separations.iter().all(|s| matches!(s.2, GaugeOutcome::Distinct(_))));
    }

    #[test]
    fn quillen_s2_matches_strict() {
        let q2 = QuillenModel::free(GradedSpace::from_pairs(&[("x", 2)]));
        let m = mapping_space_model(&SourceModel::Quillen(q2), s2_model(), 6).unwrap();
        let eqs = mc_equations(&m.algebra, &m.algebra.degree_indices(0));
        assert_eq!(eqs.len(), 1);
        let r = moduli_bijection_check(&m, 6).unwrap();
        assert!(r.matched, "{r:?}");
    }
}
