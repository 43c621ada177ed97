//! Finite-dimensional graded vector spaces and homogeneous linear maps.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::{sign, Q};

/// A graded space given by an ordered basis of named, homogeneous elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    names: Vec<String>,
    degrees: Vec<i64>,
}

impl GradedSpace {
    pub fn new(basis: Vec<(String, i64)>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (k, (name, _)) in basis.iter().enumerate() {
            if let Some(prev) = seen.insert(name.clone(), k) {
                return Err(Error::parse(
                    format!("basis[{k}]"),
                    format!("duplicate basis name `{name}` (first at basis[{prev}])"),
                ));
            }
        }
        let (names, degrees) = basis.into_iter().unzip();
        Ok(GradedSpace { names, degrees })
    }

    pub fn zero() -> Self {
        GradedSpace {
            names: Vec::new(),
            degrees: Vec::new(),
        }
    }

    pub fn from_pairs(basis: &[(&str, i64)]) -> Self {
        Self::new(basis.iter().map(|(n, d)| (n.to_string(), *d)).collect())
            .expect("distinct basis names")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn in_degree(&self, d: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn dim_in_degree(&self, d: i64) -> usize {
        self.degrees.iter().filter(|&&x| x == d).count()
    }

    /// Smallest and largest occupied degree, if nonzero.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let lo = self.degrees.iter().min()?;
        let hi = self.degrees.iter().max()?;
        Some((*lo, *hi))
    }

    /// Degree of a vector if it is homogeneous and nonzero.
    pub fn vector_degree(&self, v: &[Q]) -> Option<i64> {
        let mut d = None;
        for (i, x) in v.iter().enumerate() {
            if !x.is_zero() {
                match d {
                    None => d = Some(self.degrees[i]),
                    Some(e) if e != self.degrees[i] => return None,
                    _ => {}
                }
            }
        }
        d
    }

    /// Human-readable linear combination, mostly for error messages.
    pub fn describe(&self, v: &[Q]) -> String {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| format!("{}*{}", crate::scalar::format_q(x), self.names[i]))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// A homogeneous linear map, stored as a full matrix with rows indexed by
/// the target basis and columns by the source basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub degree: i64,
    pub matrix: Matrix,
}

impl GradedMap {
    pub fn new(source: GradedSpace, target: GradedSpace, degree: i64, matrix: Matrix) -> Result<Self> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.dim(),
                source.dim()
            )));
        }
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                if !matrix.get(i, j).is_zero() && target.degree(i) != source.degree(j) + degree {
                    return Err(Error::Degree(format!(
                        "entry [{i}][{j}] maps `{}` (degree {}) to `{}` (degree {}) in a map of degree {degree}",
                        source.name(j),
                        source.degree(j),
                        target.name(i),
                        target.degree(i)
                    )));
                }
            }
        }
        Ok(GradedMap {
            source,
            target,
            degree,
            matrix,
        })
    }

    pub fn zero(source: GradedSpace, target: GradedSpace, degree: i64) -> Self {
        let matrix = Matrix::zeros(target.dim(), source.dim());
        GradedMap {
            source,
            target,
            degree,
            matrix,
        }
    }

    pub fn identity(space: GradedSpace) -> Self {
        let matrix = Matrix::identity(space.dim());
        GradedMap {
            source: space.clone(),
            target: space,
            degree: 0,
            matrix,
        }
    }

    pub fn apply(&self, v: &[Q]) -> Vector {
        self.matrix.mul_vec(v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if other.target != self.source {
            return Err(Error::Shape("composition of maps with mismatched spaces".into()));
        }
        Ok(GradedMap {
            source: other.source.clone(),
            target: self.target.clone(),
            degree: self.degree + other.degree,
            matrix: self.matrix.mul(&other.matrix),
        })
    }

    /// The degree-`n` block: rows of target degree `n + r`, columns of source degree `n`.
    pub fn block(&self, n: i64) -> Matrix {
        let rows = self.target.in_degree(n + self.degree);
        let cols = self.source.in_degree(n);
        self.matrix.select(&rows, &cols)
    }
}

/// Tensor power basis: all index tuples in lexicographic order, with names
/// joined by `⊗` and degrees summed.
pub fn tensor_space(factors: &[&GradedSpace]) -> (GradedSpace, Vec<Vec<usize>>) {
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for f in factors {
        let mut next = Vec::with_capacity(tuples.len() * f.dim());
        for t in &tuples {
            for i in 0..f.dim() {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        tuples = next;
    }
    let basis = tuples
        .iter()
        .map(|t| {
            let name = t
                .iter()
                .zip(factors)
                .map(|(&i, f)| f.name(i).to_string())
                .collect::<Vec<_>>()
                .join("⊗");
            let deg = t.iter().zip(factors).map(|(&i, f)| f.degree(i)).sum();
            (name, deg)
        })
        .collect::<Vec<(String, i64)>>();
    let (names, degrees) = basis.into_iter().unzip();
    (GradedSpace { names, degrees }, tuples)
}

/// `(f₁⊗…⊗f_k)(x₁⊗…⊗x_k) = (−1)^{Σ_{j<i}|f_i||x_j|} f₁(x₁)⊗…⊗f_k(x_k)`.
pub fn tensor_map(fs: &[&GradedMap]) -> Result<GradedMap> {
    if fs.is_empty() {
        return Err(Error::Shape("empty tensor product of maps".into()));
    }
    let sources: Vec<&GradedSpace> = fs.iter().map(|f| &f.source).collect();
    let targets: Vec<&GradedSpace> = fs.iter().map(|f| &f.target).collect();
    let (src, src_tuples) = tensor_space(&sources);
    let (tgt, _) = tensor_space(&targets);
    let tgt_strides: Vec<usize> = {
        let mut s = vec![1; fs.len()];
        for k in (0..fs.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * targets[k + 1].dim();
        }
        s
    };
    let mut m = Matrix::zeros(tgt.dim(), src.dim());
    for (col, tuple) in src_tuples.iter().enumerate() {
        let mut odd = false;
        let mut passed = 0i64;
        for (k, &x) in tuple.iter().enumerate() {
            if fs[k].degree % 2 != 0 && passed % 2 != 0 {
                odd = !odd;
            }
            passed += sources[k].degree(x);
        }
        // expand the product of columns
        let mut partial: Vec<(usize, Q)> = vec![(0, sign(odd))];
        for (k, &x) in tuple.iter().enumerate() {
            let mut next = Vec::new();
            for (off, c) in &partial {
                for r in 0..targets[k].dim() {
                    let e = fs[k].matrix.get(r, x);
                    if !e.is_zero() {
                        next.push((off + r * tgt_strides[k], c * e));
                    }
                }
            }
            partial = next;
        }
        for (row, c) in partial {
            m.add_to(row, col, &c);
        }
    }
    Ok(GradedMap {
        source: src,
        target: tgt,
        degree: fs.iter().map(|f| f.degree).sum(),
        matrix: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn koszul_sign_in_second_slot() {
        let a = GradedSpace::from_pairs(&[("u", 3)]);
        let b = GradedSpace::from_pairs(&[("v", 2)]);
        let bt = GradedSpace::from_pairs(&[("w", 1)]);
        let id = GradedMap::identity(a.clone());
        let mut m = Matrix::zeros(1, 1);
        m.set(0, 0, q(1));
        let f = GradedMap::new(b, bt, -1, m).unwrap();
        let t = tensor_map(&[&id, &f]).unwrap();
        assert_eq!(*t.matrix.get(0, 0), q(-1));
    }

    #[test]
    fn degree_check_rejects_bad_entry() {
        let a = GradedSpace::from_pairs(&[("u", 3)]);
        let mut m = Matrix::zeros(1, 1);
        m.set(0, 0, q(1));
        assert!(GradedMap::new(a.clone(), a, -1, m).is_err());
    }
}
