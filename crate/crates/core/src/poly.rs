//! Multivariate polynomials over Q and an exact, branch-and-substitute
//! solver for the small systems produced by Maurer-Cartan equations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::Q;

/// Exponent vector ↦ coefficient; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    pub terms: BTreeMap<Vec<u32>, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q, nvars: usize) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero();
        p.add_term(e, Q::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Poly {
        let mut out = Poly::zero();
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32, nvars: usize) -> Poly {
        let mut out = Poly::constant(Q::one(), nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Constant value when the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn uses(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] > 0)
    }

    pub fn variables(&self, nvars: usize) -> Vec<usize> {
        (0..nvars).filter(|&v| self.uses(v)).collect()
    }

    /// Replaces variable `v` by `value`.
    pub fn substitute(&self, v: usize, value: &Poly, nvars: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut base = e.clone();
            let k = base[v];
            base[v] = 0;
            let mut mono = Poly::zero();
            mono.add_term(base, c.clone());
            out = out.add(&mono.mul(&value.pow(k, nvars)));
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        let mut s = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, x) in e.iter().zip(point) {
                for _ in 0..*k {
                    t *= x;
                }
            }
            s += t;
        }
        s
    }

    /// If `v` occurs only in a term `c·v` with constant `c`, returns `c` and
    /// the remaining polynomial.
    fn linear_in(&self, v: usize) -> Option<(Q, Poly)> {
        let mut coeff = None;
        let mut rest = Poly::zero();
        for (e, c) in &self.terms {
            if e[v] == 0 {
                rest.add_term(e.clone(), c.clone());
            } else if e[v] == 1 && e.iter().enumerate().all(|(i, &k)| i == v || k == 0) {
                coeff = Some(c.clone());
            } else {
                return None;
            }
        }
        coeff.map(|c| (c, rest))
    }
}

/// A solution branch: every variable is either fixed to a polynomial in the
/// free variables or is itself free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub values: Vec<Option<Poly>>,
}

impl Branch {
    pub fn free_variables(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i].is_none()).collect()
    }

    /// The point obtained by assigning the free variables.
    pub fn point(&self, free: &[(usize, Q)]) -> Vec<Q> {
        let n = self.values.len();
        let mut base = vec![Q::zero(); n];
        for (v, x) in free {
            base[*v] = x.clone();
        }
        (0..n)
            .map(|i| match &self.values[i] {
                Some(p) => p.eval(&base),
                None => base[i].clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub branches: Vec<Branch>,
    /// False when some subsystem could not be solved and was dropped.
    pub complete: bool,
}

/// Solves `eqs = 0` over Q by eliminating variables that occur linearly with
/// a constant coefficient, splitting monomial equations and taking rational
/// roots of univariate equations.
pub fn solve(eqs: &[Poly], nvars: usize) -> Solution {
    let mut out = Solution {
        branches: Vec::new(),
        complete: true,
    };
    let subst = vec![None; nvars];
    rec(eqs.to_vec(), subst, nvars, &mut out, 0);
    out
}

const MAX_DEPTH: usize = 64;

fn rec(eqs: Vec<Poly>, subst: Vec<Option<Poly>>, nvars: usize, out: &mut Solution, depth: usize) {
    if depth > MAX_DEPTH {
        out.complete = false;
        return;
    }
    let mut live = Vec::new();
    for e in eqs {
        if let Some(c) = e.as_constant() {
            if c.is_zero() {
                continue;
            }
            return; // inconsistent
        }
        if !live.contains(&e) {
            live.push(e);
        }
    }
    if live.is_empty() {
        out.branches.push(Branch { values: subst });
        return;
    }
    let assign = |v: usize, value: Poly, live: &[Poly], subst: &[Option<Poly>]| {
        let eqs: Vec<Poly> = live.iter().map(|e| e.substitute(v, &value, nvars)).collect();
        let mut s: Vec<Option<Poly>> =
            subst.iter().map(|p| p.as_ref().map(|p| p.substitute(v, &value, nvars))).collect();
        s[v] = Some(value);
        (eqs, s)
    };
    // linear elimination
    for e in &live {
        for v in e.variables(nvars) {
            if let Some((c, rest)) = e.linear_in(v) {
                let value = rest.scale(&(-Q::one() / c));
                let (eqs, s) = assign(v, value, &live, &subst);
                rec(eqs, s, nvars, out, depth + 1);
                return;
            }
        }
    }
    // monomial equations
    if let Some(e) = live.iter().find(|e| e.terms.len() == 1) {
        let vars = e.variables(nvars);
        for v in vars {
            let (eqs, s) = assign(v, Poly::zero(), &live, &subst);
            rec(eqs, s, nvars, out, depth + 1);
        }
        return;
    }
    // univariate equations
    if let Some(e) = live.iter().find(|e| e.variables(nvars).len() == 1) {
        let v = e.variables(nvars)[0];
        let coeffs = univariate_coeffs(e, v);
        match rational_roots(&coeffs) {
            Some(roots) => {
                for r in roots {
                    let (eqs, s) = assign(v, Poly::constant(r, nvars), &live, &subst);
                    rec(eqs, s, nvars, out, depth + 1);
                }
            }
            None => out.complete = false,
        }
        return;
    }
    out.complete = false;
}

fn univariate_coeffs(p: &Poly, v: usize) -> Vec<Q> {
    let deg = p.terms.keys().map(|e| e[v]).max().unwrap_or(0) as usize;
    let mut c = vec![Q::zero(); deg + 1];
    for (e, x) in &p.terms {
        c[e[v] as usize] += x;
    }
    c
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// All rational roots of `Σ c_k v^k`, or `None` when the coefficients are
/// too large to search.
pub fn rational_roots(coeffs: &[Q]) -> Option<Vec<Q>> {
    let mut c: Vec<Q> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let mut roots = Vec::new();
    if c.len() <= 1 {
        return Some(roots);
    }
    let lead = c.iter().position(|x| !x.is_zero()).unwrap();
    if lead > 0 {
        roots.push(Q::zero());
        c.drain(..lead);
    }
    if c.len() == 1 {
        return Some(roots);
    }
    let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let ps = divisors(&ints[0])?;
    let qs = divisors(ints.last().unwrap())?;
    let eval = |x: &Q| c.iter().rev().fold(Q::zero(), |acc, k| acc * x + k);
    for p in &ps {
        for q in &qs {
            for s in [1, -1] {
                let r = Q::new(p * s, q.clone());
                if !roots.contains(&r) && eval(&r).is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn parabola_is_eliminated() {
        // μ − λ² = 0 in variables (λ, μ)
        let lam = Poly::var(0, 2);
        let mu = Poly::var(1, 2);
        let eq = mu.add(&lam.mul(&lam).scale(&q(-1)));
        let s = solve(&[eq], 2);
        assert!(s.complete);
        assert_eq!(s.branches.len(), 1);
        assert_eq!(s.branches[0].free_variables(), vec![0]);
        assert_eq!(s.branches[0].point(&[(0, q(3))]), vec![q(3), q(9)]);
    }

    #[test]
    fn square_forces_zero() {
        let lam = Poly::var(0, 1);
        let s = solve(&[lam.mul(&lam)], 1);
        assert_eq!(s.branches.len(), 1);
        assert_eq!(s.branches[0].point(&[]), vec![q(0)]);
    }

    #[test]
    fn roots() {
        // 2v² − 3v + 1 = (2v − 1)(v − 1)
        let r = rational_roots(&[q(1), q(-3), q(2)]).unwrap();
        assert_eq!(r, vec![crate::scalar::q_frac(1, 2), q(1)]);
        assert!(rational_roots(&[q(-2), q(0), q(1)]).unwrap().is_empty());
    }
}
