//! Permutations and the two graph value types.
//!
//! Unordered pairs `{i, j}` are stored canonically with `i < j` and mapped to
//! a dense index in `0..C(n,2)` by [`pair_index`]. Binary graphs are bitsets
//! over that index, weighted graphs are flat arrays over it.

use crate::error::{contract, Error, Result};
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::Rng;
use std::fmt;

/// Number of unordered pairs on `n` nodes.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Dense index of the unordered pair `{i, j}` (`i != j`, any order).
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// Inverse of [`pair_index`]: returns `(i, j)` with `i < j`.
pub fn pair_at(n: usize, mut idx: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - i - 1;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
        i += 1;
    }
}

/// All pairs `(i, j)` with `i < j` in index order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn check_same(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// A bijection on `{0, …, n−1}`.
///
/// Composition follows `(π∘τ)(i) = π(τ(i))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its 0-based image list.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &x in &map {
            if x >= n || seen[x] {
                return Err(contract(format!("not a bijection on {n} elements: {map:?}")));
            }
            seen[x] = true;
        }
        Ok(Self { map })
    }

    /// Builds a permutation from 1-based images.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(contract("1-based permutation contains 0"));
        }
        Self::new(images.iter().map(|&x| x - 1).collect())
    }

    /// Builds a permutation on `n` nodes from 0-based cycles; unlisted nodes are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut map: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (pos, &x) in cycle.iter().enumerate() {
                if x >= n || touched[x] {
                    return Err(contract(format!("invalid cycle {cycle:?} on {n} nodes")));
                }
                touched[x] = true;
                map[x] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Self::new(map)
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4)(5 6 7 8)`.
    ///
    /// Inside a cycle, entries may be separated by spaces or commas; when a cycle
    /// has no separators at all, each digit is read as one node (`(12)(5678)`).
    /// `n` defaults to the largest node mentioned.
    pub fn parse_cycles(text: &str, n: Option<usize>) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {text:?}")))?;
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {text:?}")))?
                + open;
            let body = rest[open + 1..close].trim();
            let tokens: Vec<&str> = if body.contains([' ', ',']) {
                body.split([' ', ',']).filter(|t| !t.is_empty()).collect()
            } else {
                body.split("").filter(|t| !t.is_empty()).collect()
            };
            let mut cycle = Vec::with_capacity(tokens.len());
            for tok in tokens {
                let x: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad node {tok:?} in {text:?}")))?;
                if x == 0 {
                    return Err(Error::Parse("cycle notation is 1-based".into()));
                }
                cycle.push(x - 1);
            }
            cycles.push(cycle);
            rest = rest[close + 1..].trim();
        }
        let max = cycles.iter().flatten().map(|&x| x + 1).max().unwrap_or(0);
        let n = n.unwrap_or(max);
        if max > n {
            return Err(Error::Parse(format!("node {max} exceeds n = {n}")));
        }
        Self::from_cycles(n, &cycles)
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// Uniformly random permutation of `n` nodes.
    pub fn uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Self { map }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Self { map: inv }
    }

    /// Returns `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_same(self.len(), other.len())?;
        Ok(Self {
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        })
    }

    /// Advances to the next permutation in lexicographic order of the image
    /// list; returns `false` (and leaves `self` unchanged) at the last one.
    pub fn next_lexicographic(&mut self) -> bool {
        let v = &mut self.map;
        let n = v.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        true
    }

    /// Visits every permutation of `n` nodes in lexicographic order.
    pub fn for_each_of_size(n: usize, mut visit: impl FnMut(&Permutation)) {
        let mut p = Self::identity(n);
        loop {
            visit(&p);
            if !p.next_lexicographic() {
                break;
            }
        }
    }

    /// 1-based images, space separated.
    pub fn to_one_based_string(&self) -> String {
        self.map
            .iter()
            .map(|x| (x + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]", self.to_one_based_string())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_one_based_string())
    }
}

/// Read access to symmetric, zero-diagonal edge weights.
pub trait EdgeWeights<T: Scalar>: Sync {
    fn node_count(&self) -> usize;

    /// Weight of the pair with dense index `idx`.
    fn weight_at(&self, idx: usize) -> T;

    /// Weight of `{i, j}`; zero on the diagonal.
    fn weight(&self, i: usize, j: usize) -> T {
        if i == j {
            T::zero()
        } else {
            self.weight_at(pair_index(self.node_count(), i, j))
        }
    }
}

/// Simple undirected graph stored as a bitset over pair indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryGraph {
    n: usize,
    bits: Vec<u64>,
}

impl BinaryGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            bits: vec![0; pair_count(n).div_ceil(64)],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for idx in 0..pair_count(n) {
            g.insert_index(idx);
        }
        g
    }

    /// Builds a graph from 0-based pairs; rejects loops and out-of-range nodes.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            if i == j || i >= n || j >= n {
                return Err(contract(format!("invalid edge ({i}, {j}) on {n} nodes")));
            }
            g.insert(i, j);
        }
        Ok(g)
    }

    /// Builds a graph from a set of pair indices.
    pub fn from_pair_indices<I: IntoIterator<Item = usize>>(n: usize, idx: I) -> Self {
        let mut g = Self::empty(n);
        for i in idx {
            g.insert_index(i);
        }
        g
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn insert(&mut self, i: usize, j: usize) {
        self.insert_index(pair_index(self.n, i, j));
    }

    #[inline]
    pub fn insert_index(&mut self, idx: usize) {
        self.bits[idx >> 6] |= 1 << (idx & 63);
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.has_index(pair_index(self.n, i, j))
    }

    #[inline]
    pub fn has_index(&self, idx: usize) -> bool {
        self.bits[idx >> 6] >> (idx & 63) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Pair indices of present edges, ascending.
    pub fn pair_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// Edges as 0-based `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.edge_count());
        let mut row_start = 0;
        let mut i = 0;
        for idx in self.pair_indices() {
            while idx >= row_start + (n - i - 1) {
                row_start += n - i - 1;
                i += 1;
            }
            out.push((i, i + 1 + idx - row_start));
        }
        out
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for (i, j) in self.edges() {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// `result[i][j] = self[π(i)][π(j)]`.
    pub fn relabel(&self, pi: &Permutation) -> Result<Self> {
        check_same(self.n, pi.len())?;
        let inv = pi.inverse();
        let mut out = Self::empty(self.n);
        for (x, y) in self.edges() {
            out.insert(inv.apply(x), inv.apply(y));
        }
        Ok(out)
    }

    /// Edge-set intersection.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        check_same(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
        })
    }

    /// Edge-set union.
    pub fn union(&self, other: &Self) -> Result<Self> {
        check_same(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect(),
        })
    }

    /// `true` if every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Self) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Number of edges with both endpoints in `nodes`.
    pub fn induced_edge_weight(&self, nodes: &[usize]) -> f64 {
        let mut count = 0usize;
        for (a, &i) in nodes.iter().enumerate() {
            for &j in &nodes[a + 1..] {
                if self.has_edge(i, j) {
                    count += 1;
                }
            }
        }
        count as f64
    }

    /// Converts to a 0/1 weighted graph.
    pub fn to_weighted<T: Scalar>(&self) -> WeightedGraph<T> {
        WeightedGraph {
            n: self.n,
            w: (0..pair_count(self.n))
                .map(|idx| if self.has_index(idx) { T::one() } else { T::zero() })
                .collect(),
        }
    }
}

impl fmt::Debug for BinaryGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self.edges().into_iter().map(|(i, j)| (i + 1, j + 1)).collect();
        write!(f, "BinaryGraph(n={}, {:?})", self.n, edges)
    }
}

impl<T: Scalar> EdgeWeights<T> for BinaryGraph {
    fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn weight_at(&self, idx: usize) -> T {
        if self.has_index(idx) {
            T::one()
        } else {
            T::zero()
        }
    }
}

/// Symmetric real weights with zero diagonal, one entry per unordered pair.
#[derive(Clone, PartialEq, Debug)]
pub struct WeightedGraph<T> {
    n: usize,
    w: Vec<T>,
}

impl<T: Scalar> WeightedGraph<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            w: vec![T::zero(); pair_count(n)],
        }
    }

    /// Builds a graph from weights listed in pair-index order.
    pub fn from_pair_weights(n: usize, w: Vec<T>) -> Result<Self> {
        check_same(pair_count(n), w.len())?;
        Ok(Self { n, w })
    }

    /// Builds a graph from `f(i, j)` evaluated for each `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self {
            n,
            w: pairs(n).map(|(i, j)| f(i, j)).collect(),
        }
    }

    /// Builds a graph from a dense matrix; checks symmetry and the zero diagonal.
    pub fn from_matrix(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            check_same(n, row.len())?;
            if row[i] != T::zero() {
                return Err(contract(format!("nonzero diagonal at node {}", i + 1)));
            }
            for j in 0..i {
                if row[j] != rows[j][i] {
                    return Err(contract(format!("asymmetric weight at ({}, {})", j + 1, i + 1)));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        EdgeWeights::weight(self, i, j)
    }

    pub fn pair_weights(&self) -> &[T] {
        &self.w
    }

    /// `result[i][j] = self[π(i)][π(j)]`.
    pub fn relabel(&self, pi: &Permutation) -> Result<Self> {
        check_same(self.n, pi.len())?;
        Ok(Self::from_fn(self.n, |i, j| self.get(pi.apply(i), pi.apply(j))))
    }

    /// Entrywise product.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        check_same(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            w: self.w.iter().zip(&other.w).map(|(&a, &b)| a * b).collect(),
        })
    }

    /// Sum of weights over pairs inside `nodes`.
    pub fn induced_edge_weight(&self, nodes: &[usize]) -> T {
        let mut total = T::zero();
        for (a, &i) in nodes.iter().enumerate() {
            for &j in &nodes[a + 1..] {
                total = total + self.get(i, j);
            }
        }
        total
    }

    pub fn total_weight(&self) -> T {
        self.w.iter().copied().sum()
    }
}

impl<T: Scalar> EdgeWeights<T> for WeightedGraph<T> {
    fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn weight_at(&self, idx: usize) -> T {
        self.w[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_round_trip() {
        for n in 2..9 {
            for (k, (i, j)) in pairs(n).enumerate() {
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_index(n, j, i), k);
                assert_eq!(pair_at(n, k), (i, j));
            }
        }
    }

    #[test]
    fn compose_then_invert_is_identity() {
        let p = Permutation::from_one_based(&[3, 1, 4, 2]).unwrap();
        assert!(p.inverse().compose(&p).unwrap().is_identity());
        let q = Permutation::from_one_based(&[2, 3, 1, 4]).unwrap();
        let pq = p.compose(&q).unwrap();
        for i in 0..4 {
            assert_eq!(pq.apply(i), p.apply(q.apply(i)));
        }
    }

    #[test]
    fn parses_compact_and_spaced_cycles() {
        let a = Permutation::parse_cycles("(12)(34)(5678)", None).unwrap();
        let b = Permutation::parse_cycles("(1 2)(3,4)(5 6 7 8)", Some(8)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_one_based_string(), "2 1 4 3 6 7 8 5");
        assert!(Permutation::parse_cycles("(1 1)", None).is_err());
    }

    #[test]
    fn lexicographic_walk_counts_factorial() {
        let mut count = 0;
        let mut last: Option<Permutation> = None;
        Permutation::for_each_of_size(5, |p| {
            if let Some(prev) = &last {
                assert!(prev < p);
            }
            last = Some(p.clone());
            count += 1;
        });
        assert_eq!(count, 120);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn edges_come_back_sorted() {
        let g = BinaryGraph::from_edges(6, [(4, 5), (0, 3), (2, 1), (0, 1)]).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (0, 3), (1, 2), (4, 5)]);
        assert_eq!(g.edge_count(), 4);
        assert!(BinaryGraph::from_edges(3, [(1, 1)]).is_err());
    }

    #[test]
    fn weighted_from_matrix_checks_symmetry() {
        let ok = vec![vec![0.0, 1.5], vec![1.5, 0.0]];
        assert_eq!(WeightedGraph::from_matrix(&ok).unwrap().get(1, 0), 1.5);
        let bad = vec![vec![0.0, 1.5], vec![1.0, 0.0]];
        assert!(WeightedGraph::from_matrix(&bad).is_err());
    }
}
