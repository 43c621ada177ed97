//! Free graded Lie algebras with square-zero derivations (Quillen models),
//! realized inside the tensor algebra and truncated by degree.
//!
//! Degrees are shifted: a generator of Lie degree `k` is stored in degree
//! `k + 1`, and the shifted bracket `l_2(sa, sb) = (−1)^{|a|} s[a, b]` has
//! degree −1. Internally words live in the tensor algebra on the unshifted
//! generators and `[u, v] = uv − (−1)^{|u||v|} vu`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::coalgebra::CdgCoalgebra;
use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::graded::GradedSpace;
use crate::linalg::{extend_independent, support, unit_vec, zero_vec, CoordinateSystem, Matrix, Vector};
use crate::linfty::TableLInfinity;
use crate::scalar::{q, q_frac, sign, Q};

/// Noncommutative polynomial: word ↦ coefficient.
pub type TensorPoly = BTreeMap<Vec<usize>, Q>;

fn poly_add(p: &mut TensorPoly, w: Vec<usize>, c: Q) {
    crate::coalgebra::tensor_add(p, w, c);
}

fn poly_axpy(p: &mut TensorPoly, c: &Q, other: &TensorPoly) {
    for (w, x) in other {
        poly_add(p, w.clone(), c * x);
    }
}

fn poly_mul(a: &TensorPoly, b: &TensorPoly) -> TensorPoly {
    let mut out = TensorPoly::new();
    for (u, x) in a {
        for (v, y) in b {
            let mut w = u.clone();
            w.extend_from_slice(v);
            poly_add(&mut out, w, x * y);
        }
    }
    out
}

/// Graded commutator of homogeneous polynomials of (unshifted) degrees `du`, `dv`.
fn commutator(a: &TensorPoly, du: i64, b: &TensorPoly, dv: i64) -> TensorPoly {
    let mut out = poly_mul(a, b);
    let ba = poly_mul(b, a);
    poly_axpy(&mut out, &(-sign(du * dv % 2 != 0)), &ba);
    out
}

/// A Quillen model: generators (shifted degrees ≥ 2) and the differential
/// on each generator as a combination of right-normed shifted brackets
/// `[g_1, [g_2, … g_k]]` (a single letter is the generator itself).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuillenModel {
    pub generators: GradedSpace,
    pub delta: Vec<Vec<(Vec<usize>, Q)>>,
}

impl QuillenModel {
    pub fn free(generators: GradedSpace) -> Self {
        let n = generators.dim();
        QuillenModel {
            generators,
            delta: vec![Vec::new(); n],
        }
    }

    /// The Quillen model whose cobar construction is `Ω C`:
    /// `δ(c) = d_C c − ½ Σ l_2(Δc)`.
    pub fn from_coalgebra(c: &CdgCoalgebra) -> Self {
        let n = c.dim();
        let mut delta = vec![Vec::new(); n];
        for (x, terms) in delta.iter_mut().enumerate() {
            for r in 0..n {
                let e = c.d.get(r, x);
                if !e.is_zero() {
                    terms.push((vec![r], e.clone()));
                }
            }
            for (k, coef) in &c.delta[x] {
                terms.push((k.clone(), -q_frac(1, 2) * coef));
            }
        }
        QuillenModel {
            generators: c.space.clone(),
            delta,
        }
    }
}

/// A degree-truncated free Lie algebra with derivation differential, as an
/// honest dg Lie algebra: the quotient of the free algebra by everything
/// above `degree_max` and the boundaries landing in degree `degree_max`.
/// Its homology agrees with the untruncated one in every degree ≤ `degree_max`.
#[derive(Clone, Debug)]
pub struct FreeLieModel {
    pub table: TableLInfinity,
    /// Tensor-algebra realization of each basis element (unshifted words).
    pub elements: Vec<TensorPoly>,
    /// How each basis element was built from generators.
    pub exprs: Vec<LieExpr>,
    /// Basis index of each generator, if its degree is within the window.
    pub generator_index: Vec<Option<usize>>,
    pub degree_max: i64,
}

/// A basis element is either a generator or `l_2(generator, basis element)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieExpr {
    Generator(usize),
    Bracket(usize, usize),
}

struct DegreePiece {
    elements: Vec<TensorPoly>,
    names: Vec<String>,
    // (generator, partner degree, partner position) or generator only
    exprs: Vec<(usize, Option<(i64, usize)>)>,
    words: Vec<Vec<usize>>,
    coords: CoordinateSystem,
}

impl DegreePiece {
    fn word_vector(&self, p: &TensorPoly) -> Result<Vector> {
        let mut v = zero_vec(self.words.len());
        for (w, x) in p {
            match self.words.binary_search(w) {
                Ok(k) => v[k] = x.clone(),
                Err(_) => return Err(Error::Validation {
                    identity: "free Lie closure".into(),
                    detail: "element leaves the span of Lie words".into(),
                }),
            }
        }
        Ok(v)
    }

    fn coordinates(&self, p: &TensorPoly) -> Result<Vector> {
        if self.elements.is_empty() {
            if p.is_empty() {
                return Ok(Vec::new());
            }
            return Err(Error::validation("free Lie closure", "nonzero element in a zero degree"));
        }
        let v = self.word_vector(p)?;
        self.coords
            .coords(&v)
            .ok_or_else(|| Error::validation("free Lie closure", "element is not a Lie polynomial"))
    }
}

/// Builds the truncated free Lie model on the given generators.
pub fn free_lie_model(model: &QuillenModel, degree_max: i64) -> Result<FreeLieModel> {
    let gens = &model.generators;
    for g in 0..gens.dim() {
        if gens.degree(g) < 2 {
            return Err(Error::Unsupported(format!(
                "generator `{}` has degree {} < 2",
                gens.name(g),
                gens.degree(g)
            )));
        }
    }
    // unshifted letter degrees
    let letter_deg: Vec<i64> = (0..gens.dim()).map(|g| gens.degree(g) - 1).collect();
    let top = degree_max + 1; // shifted degrees computed, one above the window
    let mut pieces: BTreeMap<i64, DegreePiece> = BTreeMap::new();
    for deg in 2..=top {
        let m = deg - 1; // unshifted
        let mut cand: Vec<(TensorPoly, String)> = Vec::new();
        let mut cand_expr: Vec<(usize, Option<(i64, usize)>)> = Vec::new();
        for g in 0..gens.dim() {
            if letter_deg[g] == m {
                let mut p = TensorPoly::new();
                p.insert(vec![g], Q::one());
                cand.push((p, gens.name(g).to_string()));
                cand_expr.push((g, None));
            }
        }
        for g in 0..gens.dim() {
            let rest = deg - gens.degree(g) + 1; // shifted degree of the partner
            if let Some(piece) = pieces.get(&rest) {
                let mut gp = TensorPoly::new();
                gp.insert(vec![g], Q::one());
                for (k, (w, wname)) in piece.elements.iter().zip(&piece.names).enumerate() {
                    let c = commutator(&gp, letter_deg[g], w, rest - 1);
                    let mut shifted = TensorPoly::new();
                    poly_axpy(&mut shifted, &sign(letter_deg[g] % 2 != 0), &c);
                    cand.push((shifted, format!("[{},{}]", gens.name(g), wname)));
                    cand_expr.push((g, Some((rest, k))));
                }
            }
        }
        let words: Vec<Vec<usize>> = cand
            .iter()
            .flat_map(|(p, _)| p.keys().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let vecs: Vec<Vector> = cand
            .iter()
            .map(|(p, _)| {
                let mut v = zero_vec(words.len());
                for (w, x) in p {
                    v[words.binary_search(w).unwrap()] = x.clone();
                }
                v
            })
            .collect();
        let chosen = extend_independent(&[], &vecs, words.len());
        let elements: Vec<TensorPoly> = chosen.iter().map(|&k| cand[k].0.clone()).collect();
        let names: Vec<String> = chosen.iter().map(|&k| cand[k].1.clone()).collect();
        let exprs = chosen.iter().map(|&k| cand_expr[k]).collect();
        let chosen_vecs: Vec<Vector> = chosen.iter().map(|&k| vecs[k].clone()).collect();
        let coords = CoordinateSystem::new(&chosen_vecs, words.len());
        pieces.insert(
            deg,
            DegreePiece {
                elements,
                names,
                exprs,
                words,
                coords,
            },
        );
    }

    // differential on generators, as tensor polynomials
    let mut gen_delta: Vec<TensorPoly> = Vec::with_capacity(gens.dim());
    for (g, terms) in model.delta.iter().enumerate() {
        let mut p = TensorPoly::new();
        for (word, coef) in terms {
            if word.is_empty() || word.iter().any(|&x| x >= gens.dim()) {
                return Err(Error::Shape(format!(
                    "differential of `{}` has a malformed bracket word",
                    gens.name(g)
                )));
            }
            let (poly, d) = right_normed(word, &letter_deg);
            if d != letter_deg[g] - 1 {
                return Err(Error::Degree(format!(
                    "differential of `{}` contains a term of the wrong degree",
                    gens.name(g)
                )));
            }
            poly_axpy(&mut p, coef, &poly);
        }
        gen_delta.push(p);
    }
    let apply_delta = |p: &TensorPoly| -> TensorPoly {
        let mut out = TensorPoly::new();
        for (w, x) in p {
            let mut passed = 0i64;
            for (k, &g) in w.iter().enumerate() {
                let s = sign(passed % 2 != 0) * x;
                for (dw, y) in &gen_delta[g] {
                    let mut nw = w[..k].to_vec();
                    nw.extend_from_slice(dw);
                    nw.extend_from_slice(&w[k + 1..]);
                    poly_add(&mut out, nw, &s * y);
                }
                passed += letter_deg[g];
            }
        }
        out
    };

    // quotient in the top window degree by boundaries from one degree above
    let empty = DegreePiece {
        elements: Vec::new(),
        names: Vec::new(),
        exprs: Vec::new(),
        words: Vec::new(),
        coords: CoordinateSystem::new(&[], 0),
    };
    let top_piece = pieces.get(&degree_max).unwrap_or(&empty);
    let above = pieces.get(&(degree_max + 1)).unwrap_or(&empty);
    let mut boundaries = Vec::new();
    for e in &above.elements {
        boundaries.push(top_piece.coordinates(&apply_delta(e))?);
    }
    let tn = top_piece.elements.len();
    let bvecs: Vec<Vector> = {
        let chosen = extend_independent(&[], &boundaries, tn);
        chosen.iter().map(|&k| boundaries[k].clone()).collect()
    };
    let units: Vec<Vector> = (0..tn).map(|k| unit_vec(tn, k)).collect();
    let kept = extend_independent(&bvecs, &units, tn);
    let quotient_coords = {
        let mut all = bvecs.clone();
        all.extend(kept.iter().map(|&k| units[k].clone()));
        CoordinateSystem::new(&all, tn)
    };

    // global basis: all degrees < degree_max, then the kept top elements
    let mut basis: Vec<(String, i64)> = Vec::new();
    let mut elements: Vec<TensorPoly> = Vec::new();
    let mut raw_exprs: Vec<(usize, Option<(i64, usize)>)> = Vec::new();
    let mut offsets: BTreeMap<i64, usize> = BTreeMap::new();
    for deg in 2..degree_max {
        let piece = &pieces[&deg];
        offsets.insert(deg, basis.len());
        for k in 0..piece.elements.len() {
            basis.push((piece.names[k].clone(), deg));
            elements.push(piece.elements[k].clone());
            raw_exprs.push(piece.exprs[k]);
        }
    }
    if degree_max >= 2 {
        offsets.insert(degree_max, basis.len());
        for &k in &kept {
            basis.push((top_piece.names[k].clone(), degree_max));
            elements.push(top_piece.elements[k].clone());
            raw_exprs.push(top_piece.exprs[k]);
        }
    }
    // partners always sit strictly below the top degree
    let exprs: Vec<LieExpr> = raw_exprs
        .iter()
        .map(|&(g, partner)| match partner {
            None => LieExpr::Generator(g),
            Some((deg, k)) => LieExpr::Bracket(g, offsets[&deg] + k),
        })
        .collect();
    let dim = basis.len();
    let nb = bvecs.len();
    // express a homogeneous polynomial of shifted degree `deg` in the global basis
    let to_global = |p: &TensorPoly, deg: i64| -> Result<Vector> {
        let mut v = zero_vec(dim);
        if deg > degree_max || deg < 2 || p.is_empty() {
            return Ok(v);
        }
        let c = pieces[&deg].coordinates(p)?;
        let off = offsets[&deg];
        if deg < degree_max {
            for (k, x) in c.into_iter().enumerate() {
                v[off + k] = x;
            }
        } else {
            let qc = quotient_coords.coords(&c).expect("basis of the top degree");
            for (k, x) in qc.into_iter().skip(nb).enumerate() {
                v[off + k] = x;
            }
        }
        Ok(v)
    };

    let space = GradedSpace::new(basis.clone())?;
    let mut l1 = Matrix::zeros(dim, dim);
    for (j, e) in elements.iter().enumerate() {
        let v = to_global(&apply_delta(e), space.degree(j) - 1)?;
        for (i, x) in support(&v) {
            l1.set(i, j, x.clone());
        }
    }
    ChainComplex::new(space.clone(), l1.clone()).map_err(|e| match e {
        Error::NotSquareZero { element } => Error::validation(
            "δ² = 0",
            format!("the differential does not square to zero on `{element}`"),
        ),
        other => other,
    })?;
    let mut entries = Vec::new();
    for a in 0..dim {
        for b in a..dim {
            let da = space.degree(a);
            let db = space.degree(b);
            let deg = da + db - 1;
            if deg > degree_max {
                continue;
            }
            let c = commutator(&elements[a], da - 1, &elements[b], db - 1);
            let mut shifted = TensorPoly::new();
            poly_axpy(&mut shifted, &sign((da - 1) % 2 != 0), &c);
            let v = to_global(&shifted, deg)?;
            if v.iter().any(|x| !x.is_zero()) {
                entries.push((vec![a, b], v));
            }
        }
    }
    let table = TableLInfinity::new(space, l1, entries)?;
    let generator_index = (0..gens.dim())
        .map(|g| {
            let deg = gens.degree(g);
            if deg > degree_max {
                return None;
            }
            let mut p = TensorPoly::new();
            p.insert(vec![g], Q::one());
            let v = to_global(&p, deg).ok()?;
            let s: Vec<(usize, &Q)> = support(&v).collect();
            match s.as_slice() {
                [(i, x)] if x.is_one() => Some(*i),
                _ => None,
            }
        })
        .collect();
    Ok(FreeLieModel {
        table,
        elements,
        exprs,
        generator_index,
        degree_max,
    })
}

/// Right-normed shifted bracket `[g_1, [g_2, … g_k]]` as a tensor polynomial,
/// with its unshifted degree.
fn right_normed(word: &[usize], letter_deg: &[i64]) -> (TensorPoly, i64) {
    let last = *word.last().unwrap();
    let mut acc = TensorPoly::new();
    acc.insert(vec![last], q(1));
    let mut d = letter_deg[last];
    for &g in word[..word.len() - 1].iter().rev() {
        let mut gp = TensorPoly::new();
        gp.insert(vec![g], q(1));
        let c = commutator(&gp, letter_deg[g], &acc, d);
        let mut shifted = TensorPoly::new();
        poly_axpy(&mut shifted, &sign(letter_deg[g] % 2 != 0), &c);
        acc = shifted;
        d += letter_deg[g];
    }
    (acc, d)
}

/// The cobar construction of a Quillen model, truncated at `degree_max`.
pub fn cobar_of_quillen(model: &QuillenModel, degree_max: i64) -> Result<FreeLieModel> {
    free_lie_model(model, degree_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linfty::validate_linfty;
    use crate::par::Exec;

    #[test]
    fn one_even_generator() {
        let m = QuillenModel::free(GradedSpace::from_pairs(&[("x", 2)]));
        let f = free_lie_model(&m, 6).unwrap();
        let dims: Vec<usize> = (2..=6).map(|d| f.table.space.dim_in_degree(d)).collect();
        assert_eq!(dims, vec![1, 1, 0, 0, 0]);
        assert_eq!(f.table.space.name(1), "[x,x]");
        validate_linfty(&f.table, 3, Exec::Sequential).unwrap();
    }

    #[test]
    fn dimensions_of_free_lie_on_two_generators() {
        // two generators of Lie degree 1: dims of the free Lie superalgebra
        let m = QuillenModel::free(GradedSpace::from_pairs(&[("a", 2), ("b", 2)]));
        let f = free_lie_model(&m, 4).unwrap();
        let dims: Vec<usize> = (2..=4).map(|d| f.table.space.dim_in_degree(d)).collect();
        // degree 1: a, b; degree 2: [a,a], [a,b], [b,b]; degree 3: [a,[a,b]], [b,[a,b]]
        assert_eq!(dims, vec![2, 3, 2]);
        validate_linfty(&f.table, 3, Exec::Sequential).unwrap();
    }

    #[test]
    fn cp2_cobar_is_a_dg_lie_algebra() {
        let m = QuillenModel::from_coalgebra(&CdgCoalgebra::cp2());
        let f = free_lie_model(&m, 6).unwrap();
        validate_linfty(&f.table, 3, Exec::Sequential).unwrap();
    }
}
