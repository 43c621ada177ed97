//! Arity-truncated symmetric sequences, operads and cooperads: the built-in
//! `COCOM`, `LIE` and commutative operads, the pre-Lie bracket, convolution
//! operads and operadic twisting morphisms.
//!
//! All built-in operads are concentrated in degree 0, so no Koszul signs
//! occur in compositions; the degree −1 of the Lie bracket is carried by the
//! shifted L∞ convention elsewhere.
//!
//! Right action: `μ^σ` relabels letter `j` as `σ^{-1}(j)`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graded::GradedSpace;
use crate::linalg::{axpy, is_zero_vec, zero_vec, Matrix, Vector};
use crate::perm::{compose, inverse, permutations, unshuffles};
use crate::scalar::{q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricSequence {
    pub arity_max: usize,
    /// `spaces[n]` for `n` in `1..=arity_max`; index 0 is the empty space.
    pub spaces: Vec<GradedSpace>,
    /// `actions[n][k]` is the matrix of the `k`-th permutation of `S_n` in
    /// lexicographic order.
    pub actions: Vec<Vec<Matrix>>,
}

fn perm_index(sigma: &[usize]) -> usize {
    // rank in lexicographic order
    let n = sigma.len();
    let mut rank = 0;
    let mut fact = vec![1usize; n + 1];
    for k in 1..=n {
        fact[k] = fact[k - 1] * k;
    }
    for i in 0..n {
        let smaller = sigma[i + 1..].iter().filter(|&&x| x < sigma[i]).count();
        rank += smaller * fact[n - 1 - i];
    }
    rank
}

impl SymmetricSequence {
    pub fn dim(&self, n: usize) -> usize {
        self.spaces.get(n).map(|s| s.dim()).unwrap_or(0)
    }

    /// `v^σ` for `σ` given as a 0-based permutation of `0..n`.
    pub fn act(&self, n: usize, v: &[Q], sigma: &[usize]) -> Vector {
        self.actions[n][perm_index(sigma)].mul_vec(v)
    }

    /// Connectedness, identity and the right action law `(v^σ)^ρ = v^{σρ}`.
    pub fn check(&self) -> Result<()> {
        if self.dim(1) != 1 || self.spaces[1].degree(0) != 0 {
            return Err(Error::validation("connectedness", "arity 1 must be one-dimensional in degree 0"));
        }
        if self.spaces[0].dim() != 0 {
            return Err(Error::validation("connectedness", "arity 0 must vanish"));
        }
        for n in 1..=self.arity_max {
            let perms = permutations(n);
            if self.actions[n][0] != Matrix::identity(self.dim(n)) {
                return Err(Error::validation("symmetric action", format!("identity acts nontrivially in arity {n}")));
            }
            for s in &perms {
                for r in &perms {
                    let lhs = self.actions[n][perm_index(r)].mul(&self.actions[n][perm_index(s)]);
                    let rhs = &self.actions[n][perm_index(&compose(s, r))];
                    if lhs != *rhs {
                        return Err(Error::validation(
                            "symmetric action",
                            format!("(v^σ)^ρ ≠ v^(σρ) in arity {n}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `(n, i, m) ↦ [a][b] ↦ a ∘_i b` with `i` 1-based.
pub type CompositionTable = BTreeMap<(usize, usize, usize), Vec<Vec<Vector>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedOperad {
    pub name: String,
    pub seq: SymmetricSequence,
    pub compositions: CompositionTable,
    /// Differential per arity (zero for the built-ins).
    pub differential: Vec<Matrix>,
}

impl TruncatedOperad {
    pub fn arity_max(&self) -> usize {
        self.seq.arity_max
    }

    /// `a ∘_i b` for `a ∈ P(n)`, `b ∈ P(m)`.
    pub fn compose(&self, n: usize, a: &[Q], i: usize, m: usize, b: &[Q]) -> Result<Vector> {
        if n + m - 1 > self.arity_max() {
            return Err(Error::WindowOverflow(format!(
                "composition lands in arity {} above the truncation {}",
                n + m - 1,
                self.arity_max()
            )));
        }
        if i == 0 || i > n {
            return Err(Error::Shape(format!("slot {i} out of range for arity {n}")));
        }
        let table = &self.compositions[&(n, i, m)];
        let mut out = zero_vec(self.seq.dim(n + m - 1));
        for (x, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (y, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                axpy(&mut out, &(ca * cb), &table[x][y]);
            }
        }
        Ok(out)
    }

    pub fn act(&self, n: usize, v: &[Q], sigma: &[usize]) -> Vector {
        self.seq.act(n, v, sigma)
    }
}

/// One summand `c_1 ∘_i c_2` of a partial decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTerm {
    pub outer: usize,
    pub slot: usize,
    pub inner: usize,
    pub left: usize,
    pub right: usize,
    pub coeff: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedCooperad {
    pub name: String,
    pub seq: SymmetricSequence,
    /// `decompositions[N][c]` lists the summands of `Δ(c)` for `c ∈ C(N)`.
    pub decompositions: Vec<Vec<Vec<DecompositionTerm>>>,
}

fn trivial_sequence(arity_max: usize) -> SymmetricSequence {
    let mut spaces = vec![GradedSpace::zero()];
    let mut actions = vec![Vec::new()];
    for n in 1..=arity_max {
        spaces.push(GradedSpace::new(vec![(format!("mu{n}"), 0)]).expect("one name"));
        actions.push(permutations(n).iter().map(|_| Matrix::identity(1)).collect());
    }
    SymmetricSequence {
        arity_max,
        spaces,
        actions,
    }
}

/// `COCOM`: one generator `μ_n` in each arity with
/// `Δ(μ_N) = Σ_{p=1}^{N} Σ_{i=1}^{p} μ_p ∘_i μ_{N−p+1}`.
pub fn cocom(arity_max: usize) -> TruncatedCooperad {
    let seq = trivial_sequence(arity_max);
    let mut decompositions = vec![Vec::new()];
    for big in 1..=arity_max {
        let mut terms = Vec::new();
        for p in 1..=big {
            for i in 1..=p {
                terms.push(DecompositionTerm {
                    outer: p,
                    slot: i,
                    inner: big - p + 1,
                    left: 0,
                    right: 0,
                    coeff: q(1),
                });
            }
        }
        decompositions.push(vec![terms]);
    }
    TruncatedCooperad {
        name: "COCOM".into(),
        seq,
        decompositions,
    }
}

/// The commutative operad (endomorphisms of a one-dimensional space):
/// `m_n ∘_i m_k = m_{n+k−1}`.
pub fn commutative(arity_max: usize) -> TruncatedOperad {
    let seq = trivial_sequence(arity_max);
    let mut compositions = CompositionTable::new();
    for n in 1..=arity_max {
        for m in 1..=arity_max + 1 - n {
            for i in 1..=n {
                compositions.insert((n, i, m), vec![vec![vec![q(1)]]]);
            }
        }
    }
    let differential = (0..=arity_max).map(|n| Matrix::zeros(seq.dim(n), seq.dim(n))).collect();
    TruncatedOperad {
        name: "COM".into(),
        seq,
        compositions,
        differential,
    }
}

/// A multilinear noncommutative polynomial: word (letters 1-based) ↦ coefficient.
type Words = BTreeMap<Vec<usize>, Q>;

fn words_add(w: &mut Words, k: Vec<usize>, c: Q) {
    crate::coalgebra::tensor_add(w, k, c);
}

/// Expansion of the left-normed bracket `[…[[x_{a_1}, x_{a_2}], x_{a_3}]…]`.
fn left_normed(letters: &[usize]) -> Words {
    let mut cur = Words::new();
    cur.insert(vec![letters[0]], q(1));
    for &x in &letters[1..] {
        let mut next = Words::new();
        for (w, c) in &cur {
            let mut a = w.clone();
            a.push(x);
            words_add(&mut next, a, c.clone());
            let mut b = vec![x];
            b.extend(w);
            words_add(&mut next, b, -c.clone());
        }
        cur = next;
    }
    cur
}

struct LieBasis {
    /// Tails `(a_2, …, a_n)` of the basis monomials, letters 1-based.
    tails: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
    expansions: Vec<Words>,
}

impl LieBasis {
    fn new(n: usize) -> Self {
        let tails: Vec<Vec<usize>> = if n == 1 {
            vec![Vec::new()]
        } else {
            permutations(n - 1)
                .into_iter()
                .map(|p| p.into_iter().map(|x| x + 2).collect())
                .collect()
        };
        let index = tails.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect();
        let expansions = tails
            .iter()
            .map(|t| {
                let mut letters = vec![1];
                letters.extend(t);
                left_normed(&letters)
            })
            .collect();
        LieBasis {
            tails,
            index,
            expansions,
        }
    }

    /// Coordinates of a Lie element: the coefficients of words starting with 1.
    fn coords(&self, w: &Words) -> Vector {
        let mut v = zero_vec(self.tails.len());
        for (word, c) in w {
            if word[0] == 1 {
                if let Some(&k) = self.index.get(&word[1..].to_vec()) {
                    v[k] += c;
                }
            }
        }
        v
    }
}

fn relabel(w: &Words, map: impl Fn(usize) -> usize) -> Words {
    let mut out = Words::new();
    for (word, c) in w {
        words_add(&mut out, word.iter().map(|&x| map(x)).collect(), c.clone());
    }
    out
}

/// Substitutes `b` (arity `m`) for letter `i` of `a`.
fn substitute(a: &Words, i: usize, m: usize, b: &Words) -> Words {
    let mut out = Words::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let mut word = Vec::with_capacity(wa.len() + m - 1);
            for &x in wa {
                if x == i {
                    word.extend(wb.iter().map(|&y| y + i - 1));
                } else if x > i {
                    word.push(x + m - 1);
                } else {
                    word.push(x);
                }
            }
            words_add(&mut out, word, ca * cb);
        }
    }
    out
}

/// `LIE` on the left-normed basis with letter 1 first.
pub fn lie(arity_max: usize) -> Result<TruncatedOperad> {
    if arity_max < 2 {
        return Err(Error::WindowOverflow("LIE needs arity_max >= 2".into()));
    }
    let bases: Vec<LieBasis> = (0..=arity_max).map(|n| LieBasis::new(n.max(1))).collect();
    let mut spaces = vec![GradedSpace::zero()];
    let mut actions = vec![Vec::new()];
    for n in 1..=arity_max {
        let names = bases[n]
            .tails
            .iter()
            .map(|t| {
                let mut s = String::from("x1");
                for x in t {
                    s = format!("[{s},x{x}]");
                }
                (s, 0)
            })
            .collect();
        spaces.push(GradedSpace::new(names)?);
        let mats = permutations(n)
            .iter()
            .map(|sigma| {
                let inv = inverse(sigma);
                let cols: Vec<Vector> = bases[n]
                    .expansions
                    .iter()
                    .map(|e| bases[n].coords(&relabel(e, |x| inv[x - 1] + 1)))
                    .collect();
                Matrix::from_cols(&cols, bases[n].tails.len())
            })
            .collect();
        actions.push(mats);
    }
    let seq = SymmetricSequence {
        arity_max,
        spaces,
        actions,
    };
    let mut compositions = CompositionTable::new();
    for n in 1..=arity_max {
        for m in 1..=arity_max + 1 - n {
            for i in 1..=n {
                let table = bases[n]
                    .expansions
                    .iter()
                    .map(|a| {
                        bases[m]
                            .expansions
                            .iter()
                            .map(|b| bases[n + m - 1].coords(&substitute(a, i, m, b)))
                            .collect()
                    })
                    .collect();
                compositions.insert((n, i, m), table);
            }
        }
    }
    let differential = (0..=arity_max).map(|n| Matrix::zeros(seq.dim(n), seq.dim(n))).collect();
    Ok(TruncatedOperad {
        name: "LIE".into(),
        seq,
        compositions,
        differential,
    })
}

/// The permutation `π` of `1..=N` (0-based vector) that sends the letters of
/// `μ ∘_i ν` to the positions prescribed by the block `B` of ν's inputs.
fn block_relabel(n: usize, i: usize, m: usize, block: &[usize]) -> Vec<usize> {
    let big = n + m - 1;
    let rest: Vec<usize> = (0..big).filter(|x| !block.contains(x)).collect();
    let mut pi = vec![0; big];
    // ν's letters i..i+m-1 (1-based) go to the block
    for t in 0..m {
        pi[i - 1 + t] = block[t];
    }
    // μ's remaining letters in order go to the rest
    let mut r = 0;
    for pos in 0..big {
        if pos >= i - 1 && pos < i - 1 + m {
            continue;
        }
        pi[pos] = rest[r];
        r += 1;
    }
    pi
}

/// `{μ, ν} = Σ_B (μ ∘_{i(B)} ν)^{σ_B}`: one term per subset `B` of inputs
/// fed to `ν`, i.e. per labelled two-vertex tree. The slot `i(B)` is the
/// position of `min B` among the inputs of `μ`, and `σ_B` is the unshuffle
/// relabelling.
pub fn prelie_bracket(p: &TruncatedOperad, n: usize, mu: &[Q], m: usize, nu: &[Q]) -> Result<Vector> {
    let big = n + m - 1;
    if big > p.arity_max() {
        return Err(Error::WindowOverflow(format!("bracket lands in arity {big}")));
    }
    let mut out = zero_vec(p.seq.dim(big));
    let mut composites: BTreeMap<usize, Vector> = BTreeMap::new();
    for (block, rest) in unshuffles(big, m) {
        let i = 1 + rest.iter().filter(|&&x| x < block[0]).count();
        if let std::collections::btree_map::Entry::Vacant(e) = composites.entry(i) {
            e.insert(p.compose(n, mu, i, m, nu)?);
        }
        let c = &composites[&i];
        if is_zero_vec(c) {
            continue;
        }
        let pi = block_relabel(n, i, m, &block);
        // relabel by π is the action of π^{-1}
        let v = p.act(big, c, &inverse(&pi));
        axpy(&mut out, &q(1), &v);
    }
    Ok(out)
}

/// Operadic suspension `P ⊗_H End_{sK}`: arity `n` shifted by `1 − n`,
/// action twisted by the sign representation, and
/// `e_n ∘_i e_m = (−1)^{(m−1)(i−1)} e_{n+m−1}` on the endomorphism factor.
/// The suspension of `LIE` has a graded symmetric bracket of degree −1.
pub fn suspension(p: &TruncatedOperad) -> Result<TruncatedOperad> {
    let top = p.arity_max();
    let mut spaces = vec![GradedSpace::zero()];
    let mut actions = vec![Vec::new()];
    for n in 1..=top {
        let sp = &p.seq.spaces[n];
        let basis = (0..sp.dim())
            .map(|k| (sp.name(k).to_string(), sp.degree(k) + 1 - n as i64))
            .collect();
        spaces.push(GradedSpace::new(basis)?);
        actions.push(
            permutations(n)
                .iter()
                .zip(&p.seq.actions[n])
                .map(|(sigma, mat)| mat.scale(&q(if crate::perm::is_odd(sigma) { -1 } else { 1 })))
                .collect(),
        );
    }
    let mut compositions = CompositionTable::new();
    for ((n, i, m), table) in &p.compositions {
        let base = if (m - 1) * (i - 1) % 2 == 1 { -1 } else { 1 };
        let t = table
            .iter()
            .enumerate()
            .map(|(a, row)| {
                // Koszul sign of e_m (degree 1 − m) passing the P(n) factor
                let odd = (p.seq.spaces[*n].degree(a) * (*m as i64 - 1)).rem_euclid(2) == 1;
                let c = q(if odd { -base } else { base });
                row.iter().map(|v| v.iter().map(|x| x * &c).collect()).collect()
            })
            .collect();
        compositions.insert((*n, *i, *m), t);
    }
    let seq = SymmetricSequence {
        arity_max: top,
        spaces,
        actions,
    };
    Ok(TruncatedOperad {
        name: format!("s{}", p.name),
        seq,
        compositions,
        differential: p.differential.clone(),
    })
}

/// `Hom(C, P)` arity-wise, with `f^σ = ρ_P(σ) f ρ_C(σ^{-1})` and
/// compositions through the partial decompositions of `C`.
/// Elements of arity `n` are flattened `P(n) × C(n)` matrices, index
/// `c * dim P(n) + p`.
pub fn convolution_operad(c: &TruncatedCooperad, p: &TruncatedOperad) -> Result<TruncatedOperad> {
    let top = c.seq.arity_max.min(p.arity_max());
    let mut spaces = vec![GradedSpace::zero()];
    let mut actions = vec![Vec::new()];
    for n in 1..=top {
        let (cs, ps) = (&c.seq.spaces[n], &p.seq.spaces[n]);
        let mut basis = Vec::new();
        for x in 0..cs.dim() {
            for y in 0..ps.dim() {
                basis.push((format!("{}->{}", cs.name(x), ps.name(y)), ps.degree(y) - cs.degree(x)));
            }
        }
        spaces.push(GradedSpace::new(basis)?);
        let dp = ps.dim();
        let dim = cs.dim() * dp;
        let mats = permutations(n)
            .iter()
            .map(|sigma| {
                let rp = &p.seq.actions[n][perm_index(sigma)];
                let rc = &c.seq.actions[n][perm_index(&inverse(sigma))];
                let cols: Vec<Vector> = (0..dim)
                    .map(|k| {
                        let f = unflatten(&crate::linalg::unit_vec(dim, k), dp, cs.dim());
                        flatten(&rp.mul(&f).mul(rc))
                    })
                    .collect();
                Matrix::from_cols(&cols, dim)
            })
            .collect();
        actions.push(mats);
    }
    let seq = SymmetricSequence {
        arity_max: top,
        spaces,
        actions,
    };
    let mut compositions = CompositionTable::new();
    for n in 1..=top {
        for m in 1..=top + 1 - n {
            let big = n + m - 1;
            for i in 1..=n {
                let dn = seq.dim(n);
                let dm = seq.dim(m);
                let mut table = vec![vec![Vector::new(); dm]; dn];
                for (a, row) in table.iter_mut().enumerate() {
                    for (b, slot) in row.iter_mut().enumerate() {
                        let fa = unflatten(&crate::linalg::unit_vec(dn, a), p.seq.dim(n), c.seq.dim(n));
                        let fb = unflatten(&crate::linalg::unit_vec(dm, b), p.seq.dim(m), c.seq.dim(m));
                        let mut h = Matrix::zeros(p.seq.dim(big), c.seq.dim(big));
                        for (x, terms) in c.decompositions[big].iter().enumerate() {
                            for t in terms {
                                if t.outer != n || t.slot != i || t.inner != m {
                                    continue;
                                }
                                let va = fa.col(t.left);
                                let vb = fb.col(t.right);
                                let comp = p.compose(n, &va, i, m, &vb)?;
                                let odd = (seq.spaces[m].degree(b) * c.seq.spaces[n].degree(t.left)).rem_euclid(2) == 1;
                                let coeff = if odd { -t.coeff.clone() } else { t.coeff.clone() };
                                for (y, v) in comp.iter().enumerate() {
                                    h.add_to(y, x, &(&coeff * v));
                                }
                            }
                        }
                        *slot = flatten(&h);
                    }
                }
                compositions.insert((n, i, m), table);
            }
        }
    }
    let differential = (0..=top).map(|n| Matrix::zeros(seq.dim(n), seq.dim(n))).collect();
    Ok(TruncatedOperad {
        name: format!("Hom({},{})", c.name, p.name),
        seq,
        compositions,
        differential,
    })
}

fn flatten(f: &Matrix) -> Vector {
    let mut v = Vec::with_capacity(f.rows() * f.cols());
    for c in 0..f.cols() {
        for r in 0..f.rows() {
            v.push(f.get(r, c).clone());
        }
    }
    v
}

fn unflatten(v: &[Q], rows: usize, cols: usize) -> Matrix {
    let mut f = Matrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            f.set(r, c, v[c * rows + r].clone());
        }
    }
    f
}

/// `φ(f) = f(μ_n)`: `Hom(COCOM, P)(n) → P(n)` as a matrix, where `μ_n` is
/// the basis element of `COCOM(n)`.
pub fn cocom_evaluation(conv: &TruncatedOperad, n: usize) -> Matrix {
    let d = conv.seq.dim(n);
    let cols: Vec<Vector> = (0..d)
        .map(|k| {
            let f = unflatten(&crate::linalg::unit_vec(d, k), d, 1);
            f.col(0)
        })
        .collect();
    Matrix::from_cols(&cols, d)
}

/// Checks sequential and parallel associativity and equivariance on all
/// basis triples with arity at most `max`.
pub fn check_operad_axioms(p: &TruncatedOperad, max: usize) -> Result<()> {
    p.seq.check()?;
    let top = max.min(p.arity_max());
    let unit = |n: usize, k: usize| crate::linalg::unit_vec(p.seq.dim(n), k);
    for l in 1..=top {
        for m in 1..=top + 1 - l {
            for n in 1..=top + 2 - l - m {
                if l + m + n - 2 > top {
                    continue;
                }
                for a in 0..p.seq.dim(l) {
                    for b in 0..p.seq.dim(m) {
                        for c in 0..p.seq.dim(n) {
                            let (la, mb, nc) = (unit(l, a), unit(m, b), unit(n, c));
                            for i in 1..=l {
                                for j in 1..=m {
                                    let lhs = p.compose(l + m - 1, &p.compose(l, &la, i, m, &mb)?, i + j - 1, n, &nc)?;
                                    let rhs = p.compose(l, &la, i, m + n - 1, &p.compose(m, &mb, j, n, &nc)?)?;
                                    if lhs != rhs {
                                        return Err(Error::validation(
                                            "sequential associativity",
                                            format!("arities ({l},{m},{n}), slots ({i},{j})"),
                                        ));
                                    }
                                }
                                for k in i + 1..=l {
                                    let lhs = p.compose(l + m - 1, &p.compose(l, &la, i, m, &mb)?, k + m - 1, n, &nc)?;
                                    let mut rhs = p.compose(l + n - 1, &p.compose(l, &la, k, n, &nc)?, i, m, &mb)?;
                                    if (p.seq.spaces[m].degree(b) * p.seq.spaces[n].degree(c)).rem_euclid(2) == 1 {
                                        rhs = rhs.iter().map(|x| -x).collect();
                                    }
                                    if lhs != rhs {
                                        return Err(Error::validation(
                                            "parallel associativity",
                                            format!("arities ({l},{m},{n}), slots ({i},{k})"),
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // equivariance: λ^σ ∘_i μ = (λ ∘_{σ(i)} μ) relabelled
    for l in 1..=top {
        for m in 1..=top + 1 - l {
            let big = l + m - 1;
            for sigma in permutations(l) {
                for i in 1..=l {
                    let si = sigma[i - 1] + 1;
                    let sinv = inverse(&sigma);
                    // relabelling of the letters of λ ∘_{σ(i)} μ
                    let mut pi = vec![0; big];
                    for pos in 1..=big {
                        let target = if pos >= si && pos < si + m {
                            i + (pos - si)
                        } else {
                            let j = if pos < si { pos } else { pos - m + 1 };
                            let t = sinv[j - 1] + 1;
                            if t < i { t } else { t + m - 1 }
                        };
                        pi[pos - 1] = target - 1;
                    }
                    for a in 0..p.seq.dim(l) {
                        for b in 0..p.seq.dim(m) {
                            let (la, mb) = (unit(l, a), unit(m, b));
                            let lhs = p.compose(l, &p.act(l, &la, &sigma), i, m, &mb)?;
                            let rhs = p.act(big, &p.compose(l, &la, si, m, &mb)?, &inverse(&pi));
                            if lhs != rhs {
                                return Err(Error::validation(
                                    "equivariance",
                                    format!("arities ({l},{m}), slot {i}"),
                                ));
                            }
                        }
                    }
                }
            }
            for tau in permutations(m) {
                let mut pi: Vec<usize> = (0..big).collect();
                for i in 1..=l {
                    let tinv = inverse(&tau);
                    for t in 0..m {
                        pi[i - 1 + t] = i - 1 + tinv[t];
                    }
                    for a in 0..p.seq.dim(l) {
                        for b in 0..p.seq.dim(m) {
                            let (la, mb) = (unit(l, a), unit(m, b));
                            let lhs = p.compose(l, &la, i, m, &p.act(m, &mb, &tau))?;
                            let rhs = p.act(big, &p.compose(l, &la, i, m, &mb)?, &inverse(&pi));
                            if lhs != rhs {
                                return Err(Error::validation(
                                    "equivariance",
                                    format!("inner action, arities ({l},{m}), slot {i}"),
                                ));
                            }
                        }
                    }
                    pi = (0..big).collect();
                }
            }
        }
    }
    Ok(())
}

/// Right pre-Lie identity: `{{a,b},c} − {a,{b,c}}` is graded symmetric in
/// `b, c`, checked on basis triples of total
/// arity at most `max`.
pub fn check_prelie_identity(p: &TruncatedOperad, max: usize) -> Result<()> {
    let top = max.min(p.arity_max());
    let unit = |n: usize, k: usize| crate::linalg::unit_vec(p.seq.dim(n), k);
    for l in 1..=top {
        for m in 1..=top {
            for n in 1..=top {
                if l + m + n - 2 > top {
                    continue;
                }
                for a in 0..p.seq.dim(l) {
                    for b in 0..p.seq.dim(m) {
                        for c in 0..p.seq.dim(n) {
                            let (x, y, z) = (unit(l, a), unit(m, b), unit(n, c));
                            let assoc = |y: &Vector, m: usize, z: &Vector, n: usize| -> Result<Vector> {
                                let left = prelie_bracket(p, l + m - 1, &prelie_bracket(p, l, &x, m, y)?, n, z)?;
                                let right = prelie_bracket(p, l, &x, m + n - 1, &prelie_bracket(p, m, y, n, z)?)?;
                                Ok(left.iter().zip(&right).map(|(u, v)| u - v).collect())
                            };
                            let mut swapped = assoc(&z, n, &y, m)?;
                            if (p.seq.spaces[m].degree(b) * p.seq.spaces[n].degree(c)).rem_euclid(2) == 1 {
                                swapped = swapped.iter().map(|x| -x).collect();
                            }
                            if assoc(&y, m, &z, n)? != swapped {
                                return Err(Error::validation(
                                    "pre-Lie identity",
                                    format!("arities ({l},{m},{n}), basis ({a},{b},{c})"),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks that `φ(f) = f(μ_n)` is a bijection `Hom(COCOM, P)(n) → P(n)`
/// commuting with the symmetric actions and all partial compositions up to
/// arity `max`.
pub fn check_cocom_lemma(conv: &TruncatedOperad, p: &TruncatedOperad, max: usize) -> Result<()> {
    let top = max.min(conv.arity_max()).min(p.arity_max());
    let phi: Vec<Matrix> = (0..=top).map(|n| cocom_evaluation(conv, n)).collect();
    for n in 1..=top {
        if conv.seq.dim(n) != p.seq.dim(n) || phi[n].rank() != p.seq.dim(n) {
            return Err(Error::validation("COCOM unit", format!("φ is not bijective in arity {n}")));
        }
        for sigma in permutations(n) {
            for k in 0..conv.seq.dim(n) {
                let f = crate::linalg::unit_vec(conv.seq.dim(n), k);
                if phi[n].mul_vec(&conv.act(n, &f, &sigma)) != p.act(n, &phi[n].mul_vec(&f), &sigma) {
                    return Err(Error::validation("COCOM unit", format!("φ breaks the action in arity {n}")));
                }
            }
        }
    }
    for n in 1..=top {
        for m in 1..=top + 1 - n {
            for i in 1..=n {
                for a in 0..conv.seq.dim(n) {
                    for b in 0..conv.seq.dim(m) {
                        let fa = crate::linalg::unit_vec(conv.seq.dim(n), a);
                        let fb = crate::linalg::unit_vec(conv.seq.dim(m), b);
                        let lhs = phi[n + m - 1].mul_vec(&conv.compose(n, &fa, i, m, &fb)?);
                        let rhs = p.compose(n, &phi[n].mul_vec(&fa), i, m, &phi[m].mul_vec(&fb))?;
                        if lhs != rhs {
                            return Err(Error::validation(
                                "COCOM unit",
                                format!("φ breaks ∘_{i} in arities ({n},{m})"),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// An operadic twisting morphism as its components in a convolution operad;
/// `components[n]` lives in arity `n` (index 0 unused).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadicTwistingMorphism {
    pub components: Vec<Vector>,
    pub is_koszul: bool,
}

/// `∂τ + {τ, τ}` arity by arity; the first nonzero arity and its residual.
pub fn operadic_mc_residual(conv: &TruncatedOperad, tau: &OperadicTwistingMorphism) -> Result<Option<(usize, Vector)>> {
    let top = conv.arity_max();
    for big in 1..=top {
        let mut r = conv.differential[big].mul_vec(&tau.components[big]);
        for n in 1..=big {
            let m = big + 1 - n;
            let (a, b) = (&tau.components[n], &tau.components[m]);
            if is_zero_vec(a) || is_zero_vec(b) {
                continue;
            }
            let v = prelie_bracket(conv, n, a, m, b)?;
            axpy(&mut r, &q(1), &v);
        }
        if !is_zero_vec(&r) {
            return Ok(Some((big, r)));
        }
    }
    Ok(None)
}

/// `κ: COCOM → LIE`, `μ_2 ↦ [x_1, x_2]`, all other arities zero. The degree
/// −1 shift is realized by landing in the suspension of `LIE`, so `κ` lives
/// in `Hom(COCOM, sLIE)`.
pub fn kappa(arity_max: usize) -> Result<(TruncatedOperad, OperadicTwistingMorphism)> {
    let conv = convolution_operad(&cocom(arity_max), &suspension(&lie(arity_max)?)?)?;
    let mut components: Vec<Vector> = (0..=arity_max).map(|n| zero_vec(conv.seq.dim(n))).collect();
    components[2][0] = q(1);
    Ok((
        conv,
        OperadicTwistingMorphism {
            components,
            is_koszul: true,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lie_dimensions_and_antisymmetry() {
        let l = lie(4).unwrap();
        assert_eq!((l.seq.dim(2), l.seq.dim(3), l.seq.dim(4)), (1, 2, 6));
        assert_eq!(l.act(2, &[q(1)], &[1, 0]), vec![q(-1)]);
        assert_eq!(l.seq.spaces[3].name(1), "[[x1,x3],x2]");
    }

    #[test]
    fn perm_ranks() {
        for (k, p) in permutations(4).iter().enumerate() {
            assert_eq!(perm_index(p), k);
        }
    }

    #[test]
    fn cocom_term_counts() {
        let c = cocom(4);
        assert_eq!(c.decompositions[1][0].len(), 1);
        assert_eq!(c.decompositions[2][0].len(), 3);
        assert_eq!(c.decompositions[3][0].len(), 6);
    }

    #[test]
    fn axioms_hold() {
        check_operad_axioms(&lie(4).unwrap(), 4).unwrap();
        check_operad_axioms(&commutative(4), 4).unwrap();
        let (conv, _) = kappa(4).unwrap();
        check_operad_axioms(&conv, 4).unwrap();
    }

    #[test]
    fn kappa_is_twisting_and_com_is_not() {
        let (conv, k) = kappa(4).unwrap();
        assert_eq!(operadic_mc_residual(&conv, &k).unwrap(), None);
        let com = convolution_operad(&cocom(3), &commutative(3)).unwrap();
        let mut comps: Vec<Vector> = (0..=3).map(|n| zero_vec(com.seq.dim(n))).collect();
        comps[2][0] = q(1);
        let t = OperadicTwistingMorphism {
            components: comps,
            is_koszul: false,
        };
        assert_eq!(operadic_mc_residual(&com, &t).unwrap(), Some((3, vec![q(3)])));
    }

    #[test]
    fn scaled_kappa_still_twisting() {
        // the arity-3 residual is 4·(Jacobi) = 0, so scaling cannot break it;
        // unsuspended, the bracket is not twisting
        let lie3 = convolution_operad(&cocom(3), &lie(3).unwrap()).unwrap();
        let mut comps: Vec<Vector> = (0..=3).map(|n| zero_vec(lie3.seq.dim(n))).collect();
        comps[2][0] = q(1);
        let t = OperadicTwistingMorphism { components: comps, is_koszul: false };
        assert!(operadic_mc_residual(&lie3, &t).unwrap().is_some());
        let (conv, mut k) = kappa(4).unwrap();
        k.components[2][0] = q(2);
        assert_eq!(operadic_mc_residual(&conv, &k).unwrap(), None);
    }

    #[test]
    fn prelie_and_lemma() {
        let l = lie(4).unwrap();
        check_prelie_identity(&l, 4).unwrap();
        check_prelie_identity(&commutative(4), 4).unwrap();
        let (conv, _) = kappa(4).unwrap();
        check_prelie_identity(&conv, 4).unwrap();
        let sl = suspension(&l).unwrap();
        check_operad_axioms(&sl, 4).unwrap();
        check_prelie_identity(&sl, 4).unwrap();
        check_cocom_lemma(&conv, &sl, 4).unwrap();
        check_cocom_lemma(&convolution_operad(&cocom(4), &l).unwrap(), &l, 4).unwrap();
        let com = commutative(4);
        check_cocom_lemma(&convolution_operad(&cocom(4), &com).unwrap(), &com, 4).unwrap();
    }

    #[test]
    fn small_brackets() {
        let l = lie(3).unwrap();
        // arity 1 with arity 1: one term
        assert_eq!(prelie_bracket(&l, 1, &[q(1)], 1, &[q(1)]).unwrap(), vec![q(1)]);
        // bracket with the identity: [x1,x2] composed in both slots
        assert_eq!(prelie_bracket(&l, 2, &[q(1)], 1, &[q(1)]).unwrap(), vec![q(2)]);
        assert_eq!(l.seq.dim(1), 1);
    }
}
