//! Multi-index combinatorics and coefficient tensors.
//!
//! Sums written over "all multi-indices of length k" are sums over ordered
//! tuples. Internally most of them run over sorted keys weighted by
//! [`tuple_multiplicity`]; the weight lives here and nowhere else.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::symexpr::{Expr, Q};

/// Sorted tuple of base indices (1-based).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    /// Builds from any ordering of the entries.
    pub fn new(entries: &[u8]) -> Self {
        let mut v = entries.to_vec();
        v.sort_unstable();
        MultiIndex(v)
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The multi-index `Jj`, re-sorted.
    pub fn append(&self, j: u8) -> Self {
        let pos = self.0.partition_point(|&e| e <= j);
        let mut v = self.0.clone();
        v.insert(pos, j);
        MultiIndex(v)
    }

    pub fn union(&self, other: &MultiIndex) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        MultiIndex(v)
    }

    /// Removes one occurrence of `j`, if present.
    pub fn remove(&self, j: u8) -> Option<Self> {
        let pos = self.0.iter().position(|&e| e == j)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(MultiIndex(v))
    }

    pub fn multiplicity(&self) -> u64 {
        tuple_multiplicity(self)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for e in &self.0 {
            write!(f, "{}", e)?;
        }
        write!(f, ")")
    }
}

pub fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Number of ordered tuples that sort to `j`: |J|! / prod(count_i!).
pub fn tuple_multiplicity(j: &MultiIndex) -> u64 {
    let e = j.entries();
    let mut denom = 1u64;
    let mut run = 1usize;
    for w in 1..=e.len() {
        if w < e.len() && e[w] == e[w - 1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    factorial(e.len()) / denom
}

/// All sorted multi-indices of length `k` over `1..=n`.
pub fn enumerate(n: u8, k: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: u8, k: usize, start: u8, cur: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
        if cur.len() == k {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(n, k, i, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 1, &mut cur, &mut out);
    out
}

/// Sorted multi-indices of every length `0..=k`.
pub fn enumerate_upto(n: u8, k: usize) -> Vec<MultiIndex> {
    (0..=k).flat_map(|l| enumerate(n, l)).collect()
}

/// All ordered tuples of length `k` over `1..=n`.
pub fn tuples(n: u8, k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * n as usize);
        for t in &out {
            for i in 1..=n {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Strictly increasing tuples of length `k` (antisymmetric blocks).
pub fn increasing(n: u8, k: usize) -> Vec<Vec<u8>> {
    enumerate(n, k)
        .into_iter()
        .map(|m| m.0)
        .filter(|v| v.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

/// Sorts a block; returns the permutation sign, or `None` on a repeated entry.
pub fn sort_with_sign(block: &[u8]) -> Option<(Vec<u8>, i32)> {
    let mut v = block.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Every split `K = I ∪ J` into sub-multisets, as `(I, J)` pairs.
pub fn splits(k: &MultiIndex) -> Vec<(MultiIndex, MultiIndex)> {
    let mut groups: Vec<(u8, usize)> = Vec::new();
    for &e in k.entries() {
        match groups.last_mut() {
            Some((v, c)) if *v == e => *c += 1,
            _ => groups.push((e, 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new())];
    for (v, c) in groups {
        let mut next = Vec::new();
        for (i, j) in &out {
            for take in 0..=c {
                let mut i2: Vec<u8> = i.clone();
                let mut j2: Vec<u8> = j.clone();
                i2.extend(std::iter::repeat(v).take(take));
                j2.extend(std::iter::repeat(v).take(c - take));
                next.push((i2, j2));
            }
        }
        out = next;
    }
    out.into_iter().map(|(i, j)| (MultiIndex(i), MultiIndex(j))).collect()
}

/// Distinct orderings of a multi-index (there are `tuple_multiplicity` of them).
pub fn orderings(k: &MultiIndex) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    fn rec(rest: &mut Vec<u8>, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        let mut last = None;
        for p in 0..rest.len() {
            if last == Some(rest[p]) {
                continue;
            }
            last = Some(rest[p]);
            let v = rest.remove(p);
            cur.push(v);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(p, v);
        }
    }
    rec(&mut k.0.clone(), &mut Vec::new(), &mut out);
    out
}

/// Every permutation of `0..k` with its sign.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i32)> {
    if k == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(k - 1) {
        // insert k-1 at every slot; moving it left by t positions costs (-1)^t
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, k - 1);
            let t = (p.len() - slot) as i32;
            out.push((q, if t % 2 == 0 { s } else { -s }));
        }
    }
    out
}

/// Tensor with exact ordered-tuple keys.
///
/// Each key is `(sigma, tuple)`; the first `s` entries of the tuple form the
/// antisymmetric block `i_1..i_s`, the rest is the multi-index part `J`. A
/// tensor may hold entries of several lengths (one per rank term). Missing
/// entries are zero. Canonical tensors (antisymmetric block, symmetric `J`)
/// are produced by [`CoefficientTensor::canonical`]; others, like the
/// split-like volume coefficients, keep their exact asymmetry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTensor {
    pub n: u8,
    pub s: usize,
    entries: BTreeMap<(u8, Vec<u8>), Expr>,
}

impl CoefficientTensor {
    pub fn new(n: u8, s: usize) -> Self {
        CoefficientTensor {
            n,
            s,
            entries: BTreeMap::new(),
        }
    }

    /// Fills every tuple of lengths `s..=s+r` from a closure.
    pub fn from_fn(n: u8, m: u8, s: usize, r: usize, mut f: impl FnMut(u8, &[u8]) -> Expr) -> Self {
        let mut t = CoefficientTensor::new(n, s);
        for len in s..=s + r {
            for tup in tuples(n, len) {
                for sigma in 1..=m {
                    t.set(sigma, &tup, f(sigma, &tup));
                }
            }
        }
        t
    }

    pub fn get(&self, sigma: u8, tuple: &[u8]) -> Expr {
        self.entries
            .get(&(sigma, tuple.to_vec()))
            .cloned()
            .unwrap_or_else(Expr::zero)
    }

    pub fn set(&mut self, sigma: u8, tuple: &[u8], value: Expr) {
        let key = (sigma, tuple.to_vec());
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    pub fn add_to(&mut self, sigma: u8, tuple: &[u8], value: &Expr) {
        let v = &self.get(sigma, tuple) + value;
        self.set(sigma, tuple, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (u8, &[u8], &Expr)> {
        self.entries.iter().map(|((s, t), e)| (*s, t.as_slice(), e))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest `|J|` among stored entries (the rank actually present).
    pub fn rank(&self) -> usize {
        self.entries
            .keys()
            .map(|(_, t)| t.len().saturating_sub(self.s))
            .max()
            .unwrap_or(0)
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        let mut out = CoefficientTensor::new(self.n, self.s);
        for ((s, t), e) in &self.entries {
            out.set(*s, t, f(e));
        }
        out
    }

    pub fn scale(&self, q: &Q) -> Self {
        self.map(|e| e.scale(q))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((s, t), e) in &other.entries {
            out.add_to(*s, t, e);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Q::from_integer((-1).into())))
    }

    fn permute_positions(&self, positions: &[usize], signed: bool) -> Self {
        let k = positions.len();
        let perms = permutations(k);
        let norm = Q::new(1.into(), (factorial(k) as i64).into());
        let mut out = CoefficientTensor::new(self.n, self.s);
        for ((sigma, tup), e) in &self.entries {
            if positions.iter().any(|&p| p >= tup.len()) {
                out.add_to(*sigma, tup, e);
                continue;
            }
            // value at tup contributes to every permuted key
            for (p, sg) in &perms {
                let mut u = tup.clone();
                for (a, &pa) in positions.iter().enumerate() {
                    u[positions[p[a]]] = tup[pa];
                }
                let w = if signed && *sg < 0 { -norm.clone() } else { norm.clone() };
                out.add_to(*sigma, &u, &e.scale(&w));
            }
        }
        out
    }

    /// Normalized antisymmetrizer `1/k! sum sign(p) T^{p(...)}` over the positions.
    /// Entries too short to contain every position are left unchanged.
    pub fn antisymmetrize(&self, positions: &[usize]) -> Self {
        self.permute_positions(positions, true)
    }

    pub fn symmetrize(&self, positions: &[usize]) -> Self {
        self.permute_positions(positions, false)
    }

    /// Projection onto block-antisymmetric, J-symmetric tensors.
    pub fn canonical(&self) -> Self {
        let mut out = CoefficientTensor::new(self.n, self.s);
        let block: Vec<usize> = (0..self.s).collect();
        let lens: std::collections::BTreeSet<usize> = self.entries.keys().map(|(_, t)| t.len()).collect();
        for len in lens {
            let mut part = CoefficientTensor::new(self.n, self.s);
            for ((sg, t), e) in &self.entries {
                if t.len() == len {
                    part.set(*sg, t, e.clone());
                }
            }
            let jpos: Vec<usize> = (self.s..len).collect();
            let p = part.antisymmetrize(&block).symmetrize(&jpos);
            out = out.add(&p);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate(2, 2).len(), 3);
        assert_eq!(enumerate(3, 0).len(), 1);
        assert_eq!(enumerate(3, 2).len(), 6);
        for n in 1..=4u8 {
            for k in 0..=4usize {
                assert_eq!(enumerate(n, k).len() as u64, binomial(n as usize + k - 1, k));
            }
        }
    }

    #[test]
    fn multiplicities() {
        assert_eq!(tuple_multiplicity(&MultiIndex::new(&[1, 2])), 2);
        assert_eq!(tuple_multiplicity(&MultiIndex::new(&[1, 1])), 1);
        assert_eq!(tuple_multiplicity(&MultiIndex::new(&[1, 2, 3])), 6);
        assert_eq!(tuple_multiplicity(&MultiIndex::new(&[2, 1, 1])), 3);
        assert_eq!(tuple_multiplicity(&MultiIndex::empty()), 1);
        // the weights count every ordered tuple exactly once
        for n in 1..=3u8 {
            for k in 0..=4 {
                let total: u64 = enumerate(n, k).iter().map(tuple_multiplicity).sum();
                assert_eq!(total, (n as u64).pow(k as u32));
            }
        }
    }

    #[test]
    fn splits_and_orderings() {
        let k = MultiIndex::new(&[1, 1, 2]);
        assert_eq!(splits(&k).len(), 6);
        assert_eq!(orderings(&k).len() as u64, tuple_multiplicity(&k));
        for (i, j) in splits(&k) {
            assert_eq!(i.union(&j), k);
        }
    }

    #[test]
    fn append_resorts() {
        let j = MultiIndex::new(&[2, 3]).append(1);
        assert_eq!(j.entries(), &[1, 2, 3]);
        assert!(MultiIndex::new(&[3]) > MultiIndex::new(&[1]));
        assert!(MultiIndex::new(&[1, 1]) > MultiIndex::new(&[3]));
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        for (perm, s) in p {
            let b: Vec<u8> = perm.iter().map(|&x| x as u8).collect();
            let (_, s2) = sort_with_sign(&b).unwrap();
            assert_eq!(s, s2);
        }
        assert!(sort_with_sign(&[1, 1]).is_none());
    }

    #[test]
    fn two_term_antisymmetrizer() {
        let mut t = CoefficientTensor::new(2, 0);
        t.set(1, &[1, 2], Expr::one());
        let a = t.antisymmetrize(&[0, 1]);
        assert_eq!(a.get(1, &[1, 2]), Expr::constant(Q::new(1.into(), 2.into())));
        assert_eq!(a.get(1, &[2, 1]), Expr::constant(Q::new((-1).into(), 2.into())));
        let s = t.symmetrize(&[0, 1]);
        assert_eq!(s.get(1, &[1, 2]), Expr::constant(Q::new(1.into(), 2.into())));
        assert_eq!(s.get(1, &[2, 1]), Expr::constant(Q::new(1.into(), 2.into())));
        assert_eq!(a.add(&s), t);
    }

    #[test]
    fn symmetric_block_antisymmetrizes_to_zero() {
        let mut t = CoefficientTensor::new(3, 0);
        for tup in tuples(3, 2) {
            let v = Expr::from_i64((tup[0] * tup[1]) as i64);
            t.set(1, &tup, v);
        }
        assert!(t.antisymmetrize(&[0, 1]).is_zero());
    }
}
