//! Permutations, unshuffles, set partitions and Koszul signs.

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// `(p ∘ q)(i) = p[q[i]]`.
pub fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

/// Parity of a permutation.
pub fn is_odd(p: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                odd = !odd;
            }
        }
    }
    odd
}

/// Koszul sign (as "is odd") of listing graded elements in the order
/// `order[0], order[1], ...` when they were originally in order `0, 1, ...`.
pub fn koszul_odd(degrees: &[i64], order: &[usize]) -> bool {
    let mut odd = false;
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            if order[a] > order[b] && degrees[order[a]] % 2 != 0 && degrees[order[b]] % 2 != 0 {
                odd = !odd;
            }
        }
    }
    odd
}

/// Sorts a list of basis indices into non-decreasing order, returning the
/// sorted list and the Koszul parity of the reordering. Returns `None` when
/// an odd element is repeated, since the graded-symmetric product vanishes.
pub fn sort_graded(items: &[usize], degree: impl Fn(usize) -> i64) -> Option<(Vec<usize>, bool)> {
    let degrees: Vec<i64> = items.iter().map(|&i| degree(i)).collect();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&k| (items[k], k));
    let sorted: Vec<usize> = order.iter().map(|&k| items[k]).collect();
    for w in sorted.windows(2) {
        if w[0] == w[1] && degree(w[0]) % 2 != 0 {
            return None;
        }
    }
    Some((sorted, koszul_odd(&degrees, &order)))
}

/// All ways to split positions `0..n` into a block of size `k` and its
/// complement, both listed increasingly.
pub fn unshuffles(n: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut chosen: Vec<usize> = (0..k).collect();
    loop {
        let rest: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
        out.push((chosen.clone(), rest));
        // next k-combination
        let Some(i) = (0..k).rev().find(|&i| chosen[i] < n - k + i) else {
            break;
        };
        chosen[i] += 1;
        for j in i + 1..k {
            chosen[j] = chosen[j - 1] + 1;
        }
    }
    out
}

/// Unordered partitions of `0..n` into exactly `k` nonempty blocks. Blocks are
/// increasing and listed in order of their minimal elements.
pub fn set_partitions(n: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, k: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            if cur.len() == k {
                out.push(cur.clone());
            }
            return;
        }
        // remaining elements must be able to fill the missing blocks
        if cur.len() + (n - i) < k {
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, n, k, cur, out);
            cur[b].pop();
        }
        if cur.len() < k {
            cur.push(vec![i]);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 || k == 0 || k > n {
        return out;
    }
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All multisets of size `k` drawn from `0..n`, as sorted vectors.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(unshuffles(5, 2).len(), 10);
        // Stirling numbers of the second kind
        assert_eq!(set_partitions(4, 2).len(), 7);
        assert_eq!(set_partitions(5, 3).len(), 25);
        assert_eq!(multisets(3, 2).len(), 6);
    }

    #[test]
    fn koszul_of_swap() {
        assert!(koszul_odd(&[1, 3], &[1, 0]));
        assert!(!koszul_odd(&[2, 3], &[1, 0]));
        let (s, odd) = sort_graded(&[2, 0], |_| 1).unwrap();
        assert_eq!(s, vec![0, 2]);
        assert!(odd);
        assert!(sort_graded(&[1, 1], |_| 3).is_none());
        assert!(sort_graded(&[1, 1], |_| 2).is_some());
    }

    #[test]
    fn inverse_and_compose() {
        for p in permutations(4) {
            let q = inverse(&p);
            assert_eq!(compose(&p, &q), vec![0, 1, 2, 3]);
        }
    }
}
