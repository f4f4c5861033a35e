//! Partition combinatorics behind the dual-variable formula and the
//! pair-partition moment oracle.
//!
//! Dual partitions live on points `{0, ..., n}`: the block `{0, partner0}`
//! is forced, every other pair `{a, b}` (`a > b`) straddles `partner0`
//! (`b < partner0 < a`), and every singleton sits above `partner0`. The
//! q-exponent of such a partition counts interleaving pairs once, nested
//! pairs twice, and each singleton lying inside a pair once; the pair
//! `{0, partner0}` participates. This weight is pinned by the requirement
//! that the closed formula reproduce the commutation-relation recursion for
//! the dual variables, which is checked exhaustively in the test suite.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;

/// A pair/singleton partition of `{0, ..., n}` from the dual-variable family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPartition {
    /// Word length; the partition lives on `n + 1` points.
    pub n: usize,
    /// Partner of point 0.
    pub partner0: usize,
    /// Remaining pairs `(hi, lo)` with `lo < partner0 < hi`, sorted.
    pub pairs: Vec<(usize, usize)>,
    /// Singletons, all `> partner0`, ascending.
    pub singletons: Vec<usize>,
    /// `(-1)^(partner0 - 1)`.
    pub sign: i8,
    /// Exponent of `q` attached to this partition.
    pub q_exponent: u32,
}

/// q-exponent of a dual partition given its blocks.
pub fn dual_q_exponent(partner0: usize, pairs: &[(usize, usize)], singletons: &[usize]) -> u32 {
    let mut all: Vec<(usize, usize)> = Vec::with_capacity(pairs.len() + 1);
    all.push((0, partner0));
    all.extend(pairs.iter().map(|&(hi, lo)| (lo, hi)));
    let mut w = 0u32;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let (mut a, mut b) = all[i];
            let (mut c, mut d) = all[j];
            if a > c {
                core::mem::swap(&mut a, &mut c);
                core::mem::swap(&mut b, &mut d);
            }
            if a < c && c < b && b < d {
                w += 1; // interleaving
            } else if a < c && d < b {
                w += 2; // nested
            }
        }
    }
    for &s in singletons {
        for &(lo, hi) in &all {
            if lo < s && s < hi {
                w += 1;
            }
        }
    }
    w
}

/// All dual partitions of `{0, ..., n}` (the word has length `n`), ordered by
/// `partner0` ascending and then lexicographically on the pair list.
pub fn enumerate_dual_partitions(n: usize) -> Vec<DualPartition> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for p in 1..=n {
        let low: Vec<usize> = (1..p).collect();
        let high: Vec<usize> = (p + 1..=n).collect();
        if low.len() > high.len() {
            continue;
        }
        // every low point pairs with a distinct high point; the rest of the
        // high points are singletons
        let mut partners = vec![usize::MAX; low.len()];
        let mut used = vec![false; high.len()];
        enumerate_injections(&low, &high, 0, &mut partners, &mut used, &mut |partners| {
            let mut pairs: Vec<(usize, usize)> =
                low.iter().zip(partners).map(|(&l, &u)| (u, l)).collect();
            pairs.sort_unstable();
            let singletons: Vec<usize> = high
                .iter()
                .copied()
                .filter(|h| !partners.contains(h))
                .collect();
            out.push(DualPartition {
                n,
                partner0: p,
                q_exponent: dual_q_exponent(p, &pairs, &singletons),
                sign: if p % 2 == 1 { 1 } else { -1 },
                pairs,
                singletons,
            });
        });
    }
    // partner0 is already ascending; fix the within-p order to be lex on pairs
    out.sort_by(|a, b| a.partner0.cmp(&b.partner0).then_with(|| a.pairs.cmp(&b.pairs)));
    out
}

fn enumerate_injections(
    low: &[usize],
    high: &[usize],
    k: usize,
    partners: &mut Vec<usize>,
    used: &mut Vec<bool>,
    emit: &mut impl FnMut(&Vec<usize>),
) {
    if k == low.len() {
        emit(partners);
        return;
    }
    for (h, &hv) in high.iter().enumerate() {
        if !used[h] {
            used[h] = true;
            partners[k] = hv;
            enumerate_injections(low, high, k + 1, partners, used, emit);
            used[h] = false;
        }
    }
}

impl DualPartition {
    /// All blocks, for membership re-checks.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![0, self.partner0]];
        out.extend(self.pairs.iter().map(|&(hi, lo)| vec![lo, hi]));
        out.extend(self.singletons.iter().map(|&s| vec![s]));
        out
    }

    /// For a no-singleton partition on `{0, ..., 2m-1}`, the permutation of
    /// `{0, ..., m-2}` sending each low point `l+1` to `partner(l+1) - m - 1`
    /// (0-based). `None` when singletons are present.
    pub fn no_singleton_permutation(&self) -> Option<Vec<usize>> {
        if !self.singletons.is_empty() {
            return None;
        }
        let m = self.partner0;
        debug_assert_eq!(self.n, 2 * m - 1);
        let mut perm = vec![0; m - 1];
        for &(hi, lo) in &self.pairs {
            perm[lo - 1] = hi - m - 1;
        }
        Some(perm)
    }

    /// Inverse of [`no_singleton_permutation`](Self::no_singleton_permutation).
    pub fn from_no_singleton_permutation(perm: &[usize]) -> Self {
        let m = perm.len() + 1;
        let n = 2 * m - 1;
        let mut pairs: Vec<(usize, usize)> =
            perm.iter().enumerate().map(|(l, &u)| (u + m + 1, l + 1)).collect();
        pairs.sort_unstable();
        DualPartition {
            n,
            partner0: m,
            q_exponent: dual_q_exponent(m, &pairs, &[]),
            sign: if m % 2 == 1 { 1 } else { -1 },
            pairs,
            singletons: Vec::new(),
        }
    }
}

/// Number of inversions of a permutation given as `perm[i] = sigma(i)`.
pub fn inversions(perm: &[usize]) -> u32 {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    inv
}

/// All perfect matchings of `{0, ..., n-1}`; empty for odd `n`, one empty
/// matching for `n = 0`. Deterministic order: smallest unmatched point pairs
/// with partners in ascending order.
pub fn pair_partitions(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n % 2 == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut rem: Vec<usize> = (0..n).collect();
    let mut cur = Vec::new();
    fn rec(rem: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rem.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = rem[0];
        for k in 1..rem.len() {
            let b = rem[k];
            let mut rest: Vec<usize> =
                rem.iter().copied().filter(|&x| x != a && x != b).collect();
            cur.push((a, b));
            rec(&mut rest, cur, out);
            cur.pop();
        }
    }
    rec(&mut rem, &mut cur, &mut out);
    out
}

/// Geometric crossing number of a perfect matching: pairs `{a,b}`, `{c,d}`
/// with `a < c < b < d` cross.
pub fn crossings_of_pairing(pairs: &[(usize, usize)]) -> u32 {
    let mut cr = 0;
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (mut a, mut b) = pairs[i];
            let (mut c, mut d) = pairs[j];
            if a > b {
                core::mem::swap(&mut a, &mut b);
            }
            if c > d {
                core::mem::swap(&mut c, &mut d);
            }
            if a > c {
                core::mem::swap(&mut a, &mut c);
                core::mem::swap(&mut b, &mut d);
            }
            if a < c && c < b && b < d {
                cr += 1;
            }
        }
    }
    cr
}

/// `[k]_q! = prod_{j=1}^{k} (1 - q^j)/(1 - q)`, with `[0]_q! = 1`.
pub fn q_factorial<S: Scalar>(k: usize, q: &S) -> S {
    let mut acc = S::one();
    let mut bracket = S::zero(); // [j]_q = 1 + q + ... + q^{j-1}
    let mut qpow = S::one();
    for _ in 1..=k {
        bracket = bracket.add(&qpow);
        qpow = qpow.mul(q);
        acc = acc.mul(&bracket);
    }
    acc
}
