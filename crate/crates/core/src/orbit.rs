//! Node cycles, the induced edge permutation, edge-orbit classification and
//! backbone graphs.
//!
//! Conventions used for labels. Each node orbit is listed from its minimum
//! element following σ; `pos(x)` is the index of `x` in that list. For an
//! edge `{x, y}` with `x` in orbit `u` and `y` in orbit `v`:
//!
//! * matching (`u < v`, equal lengths `m`): label `((pos y − pos x) mod m) + 1`;
//! * bridge (`u` longer with length `m`, `v` of length `ℓ`):
//!   label `((pos y − pos x) mod gcd(m, ℓ)) + 1`;
//! * cycle (`u = v`): with `d = (pos y − pos x) mod m`, label `min(d, m − d)`;
//!   the case `d = m/2` is a split.
//!
//! These quantities are invariant along an orbit, so every edge orbit has a
//! well-defined label.

use crate::dsu::ExcessUnionFind;
use crate::error::{contract, Error, Result};
use crate::graph::{pair_at, pair_count, pair_index, BinaryGraph, Permutation};
use std::collections::BTreeSet;
use std::fmt;

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Counts of node orbits by length.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycleType {
    /// `by_len[k]` = number of orbits of length `k`; index 0 unused.
    by_len: Vec<usize>,
}

impl CycleType {
    /// Builds a cycle type from `[n_1, n_2, …]`.
    pub fn from_counts(counts: &[usize]) -> Self {
        let mut by_len = vec![0];
        by_len.extend_from_slice(counts);
        let n: usize = by_len.iter().enumerate().map(|(k, c)| k * c).sum();
        by_len.resize(n.max(counts.len()) + 1, 0);
        Self { by_len }
    }

    /// Cycle type with the given orbit lengths.
    pub fn from_lengths(lengths: &[usize]) -> Self {
        let n: usize = lengths.iter().sum();
        let mut by_len = vec![0; n + 1];
        for &l in lengths {
            by_len[l] += 1;
        }
        Self { by_len }
    }

    /// Parses a comma-separated list `n_1,n_2,…`.
    pub fn parse(text: &str) -> Result<Self> {
        let counts: Vec<usize> = text
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad cycle type {text:?}")))?;
        Ok(Self::from_counts(&counts))
    }

    pub fn n(&self) -> usize {
        self.by_len.iter().enumerate().map(|(k, c)| k * c).sum()
    }

    /// Number of orbits of length `k`.
    pub fn count(&self, k: usize) -> usize {
        self.by_len.get(k).copied().unwrap_or(0)
    }

    /// `[n_1, …, n_n]`.
    pub fn counts(&self) -> Vec<usize> {
        let n = self.n();
        (1..=n).map(|k| self.count(k)).collect()
    }

    /// One entry per orbit, ascending.
    pub fn lengths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &c) in self.by_len.iter().enumerate() {
            out.extend(std::iter::repeat_n(k, c));
        }
        out
    }

    /// Permutation made of consecutive cycles with ascending lengths.
    pub fn canonical_permutation(&self) -> Permutation {
        let mut map = Vec::with_capacity(self.n());
        for len in self.lengths() {
            let start = map.len();
            map.extend((0..len).map(|t| start + (t + 1) % len));
        }
        Permutation::new(map).expect("consecutive cycles form a permutation")
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<String> = self.counts().iter().map(|c| c.to_string()).collect();
        f.write_str(&counts.join(","))
    }
}

/// Node orbits of a permutation.
#[derive(Clone, Debug)]
pub struct CycleDecomposition {
    sigma: Permutation,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
    position: Vec<usize>,
}

/// Splits σ into node orbits, each listed from its minimum element and
/// following σ; orbits are ordered by minimum element.
pub fn node_cycles(sigma: &Permutation) -> CycleDecomposition {
    let n = sigma.len();
    let mut orbit_of = vec![usize::MAX; n];
    let mut position = vec![0; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut cycle = Vec::new();
        let mut x = start;
        loop {
            orbit_of[x] = id;
            position[x] = cycle.len();
            cycle.push(x);
            x = sigma.apply(x);
            if x == start {
                break;
            }
        }
        orbits.push(cycle);
    }
    CycleDecomposition {
        sigma: sigma.clone(),
        orbits,
        orbit_of,
        position,
    }
}

impl CycleDecomposition {
    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x]
    }

    pub fn position(&self, x: usize) -> usize {
        self.position[x]
    }

    pub fn orbit_len(&self, id: usize) -> usize {
        self.orbits[id].len()
    }

    /// Orbit lengths indexed by orbit id.
    pub fn lengths(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::from_lengths(&self.lengths())
    }

    /// Element at position `pos` (taken cyclically) of orbit `id`.
    pub fn element(&self, id: usize, pos: usize) -> usize {
        let orbit = &self.orbits[id];
        orbit[pos % orbit.len()]
    }
}

/// `σ^E` as a map on pair indices: `{i, j} ↦ {σ(i), σ(j)}`.
pub fn edge_permutation(sigma: &Permutation) -> Vec<usize> {
    let n = sigma.len();
    (0..pair_count(n))
        .map(|idx| {
            let (i, j) = pair_at(n, idx);
            pair_index(n, sigma.apply(i), sigma.apply(j))
        })
        .collect()
}

/// One cycle of the edge permutation.
///
/// The traversal starts at the lexicographically smallest pair `(i, j)` and
/// visits `(σ(i), σ(j))`, `(σ²(i), σ²(j))`, … as oriented pairs.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EdgeOrbit {
    n: usize,
    oriented: Vec<(usize, usize)>,
}

impl EdgeOrbit {
    fn trace(sigma: &Permutation, start: (usize, usize)) -> Self {
        let mut oriented = vec![start];
        let (i0, j0) = start;
        let (mut i, mut j) = (sigma.apply(i0), sigma.apply(j0));
        while !((i == i0 && j == j0) || (i == j0 && j == i0)) {
            oriented.push((i, j));
            (i, j) = (sigma.apply(i), sigma.apply(j));
        }
        Self { n: sigma.len(), oriented }
    }

    pub fn len(&self) -> usize {
        self.oriented.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oriented.is_empty()
    }

    /// Pairs in traversal order, oriented as produced by σ.
    pub fn oriented(&self) -> &[(usize, usize)] {
        &self.oriented
    }

    /// Pairs in traversal order as canonical `(min, max)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.oriented.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect()
    }

    pub fn representative(&self) -> (usize, usize) {
        self.oriented[0]
    }

    pub fn pair_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.oriented.iter().map(move |&(i, j)| pair_index(self.n, i, j))
    }

    /// 1-based listing in the style `(15,26,17,28)`; pairs are written
    /// `i-j` once `n` exceeds 9.
    pub fn display_one_based(&self) -> String {
        let parts: Vec<String> = self
            .oriented
            .iter()
            .map(|&(i, j)| {
                if self.n <= 9 {
                    format!("{}{}", i + 1, j + 1)
                } else {
                    format!("{}-{}", i + 1, j + 1)
                }
            })
            .collect();
        format!("({})", parts.join(","))
    }
}

/// Counts of edge orbits by length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeOrbitCensus {
    /// `by_len[k]` = number of orbits of length `k`; index 0 unused.
    by_len: Vec<usize>,
}

impl EdgeOrbitCensus {
    pub fn count(&self, k: usize) -> usize {
        self.by_len.get(k).copied().unwrap_or(0)
    }

    /// `Σ k·N_k`.
    pub fn total_edges(&self) -> usize {
        self.by_len.iter().enumerate().map(|(k, c)| k * c).sum()
    }

    pub fn orbit_count(&self) -> usize {
        self.by_len.iter().sum()
    }

    /// Nonzero `(k, N_k)` entries, ascending in `k`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.by_len.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k, c))
    }
}

/// Edge census straight from the edge permutation, without materialising orbits.
pub fn edge_census(sigma: &Permutation) -> EdgeOrbitCensus {
    let map = edge_permutation(sigma);
    let mut seen = vec![false; map.len()];
    let mut by_len = vec![0; map.len() + 1];
    for start in 0..map.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = map[x];
            len += 1;
        }
        by_len[len] += 1;
    }
    EdgeOrbitCensus { by_len }
}

/// All edge orbits, sorted by representative, and their census.
pub fn edge_orbits(sigma: &Permutation) -> (Vec<EdgeOrbit>, EdgeOrbitCensus) {
    let n = sigma.len();
    let m = pair_count(n);
    let mut seen = vec![false; m];
    let mut orbits = Vec::new();
    let mut by_len = vec![0; m + 1];
    for idx in 0..m {
        if seen[idx] {
            continue;
        }
        let orbit = EdgeOrbit::trace(sigma, pair_at(n, idx));
        for p in orbit.pair_indices() {
            seen[p] = true;
        }
        by_len[orbit.len()] += 1;
        orbits.push(orbit);
    }
    (orbits, EdgeOrbitCensus { by_len })
}

/// `(N_1, N_2)` predicted from the cycle type:
/// `N_1 = C(n_1,2) + n_2` and `N_2 = 2·C(n_2,2) + n_1·n_2 + n_4`.
pub fn census_predict_small(ct: &CycleType) -> (usize, usize) {
    let (n1, n2, n4) = (ct.count(1), ct.count(2), ct.count(4));
    let c2 = |x: usize| x * x.saturating_sub(1) / 2;
    (c2(n1) + n2, 2 * c2(n2) + n1 * n2 + n4)
}

/// Four-way classification of an edge orbit by the node orbits of its endpoints.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OrbitClass {
    /// Between two distinct node orbits of equal length `m`.
    Matching { m: usize },
    /// Between node orbits of lengths `m > l`.
    Bridge { m: usize, l: usize },
    /// Inside one node orbit of length `m`, forming an `m`-cycle.
    Cycle { m: usize },
    /// Inside one node orbit of even length `m`, joining antipodal nodes.
    Split { m: usize },
}

impl OrbitClass {
    /// Length of the edge orbit.
    pub fn orbit_len(&self) -> usize {
        match *self {
            OrbitClass::Matching { m } | OrbitClass::Cycle { m } => m,
            OrbitClass::Bridge { m, l } => lcm(m, l),
            OrbitClass::Split { m } => m / 2,
        }
    }

    pub fn tag(&self) -> char {
        match self {
            OrbitClass::Matching { .. } => 'M',
            OrbitClass::Bridge { .. } => 'B',
            OrbitClass::Cycle { .. } => 'C',
            OrbitClass::Split { .. } => 'S',
        }
    }
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OrbitClass::Bridge { m, l } => write!(f, "B_{{{m},{l}}}"),
            OrbitClass::Matching { m } | OrbitClass::Cycle { m } | OrbitClass::Split { m } => {
                write!(f, "{}_{m}", self.tag())
            }
        }
    }
}

fn check_orbit(decomp: &CycleDecomposition, orbit: &EdgeOrbit) -> Result<()> {
    let n = decomp.n();
    if orbit.n != n || orbit.is_empty() {
        return Err(contract("edge orbit does not belong to this permutation"));
    }
    let sigma = decomp.sigma();
    let idx: Vec<usize> = orbit.pair_indices().collect();
    let distinct: BTreeSet<usize> = idx.iter().copied().collect();
    if distinct.len() != idx.len() {
        return Err(contract("edge orbit lists a pair twice"));
    }
    for (t, &(i, j)) in orbit.oriented.iter().enumerate() {
        let next = idx[(t + 1) % idx.len()];
        if pair_index(n, sigma.apply(i), sigma.apply(j)) != next {
            return Err(contract("listed pairs are not an orbit of the edge permutation"));
        }
    }
    Ok(())
}

fn class_of_pair(decomp: &CycleDecomposition, i: usize, j: usize) -> OrbitClass {
    let (oi, oj) = (decomp.orbit_of(i), decomp.orbit_of(j));
    let (mi, mj) = (decomp.orbit_len(oi), decomp.orbit_len(oj));
    if oi != oj {
        if mi == mj {
            OrbitClass::Matching { m: mi }
        } else {
            OrbitClass::Bridge { m: mi.max(mj), l: mi.min(mj) }
        }
    } else {
        let d = (decomp.position(j) + mi - decomp.position(i)) % mi;
        if 2 * d == mi {
            OrbitClass::Split { m: mi }
        } else {
            OrbitClass::Cycle { m: mi }
        }
    }
}

/// Classifies an edge orbit of σ.
pub fn classify_orbit(decomp: &CycleDecomposition, orbit: &EdgeOrbit) -> Result<OrbitClass> {
    check_orbit(decomp, orbit)?;
    let (i, j) = orbit.representative();
    Ok(class_of_pair(decomp, i, j))
}

/// Kind of a giant edge.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GiantEdgeKind {
    Matching,
    Bridge,
    Cycle,
}

/// Labeled edge of a backbone graph.
///
/// Matching edges have `u < v`; bridges go from the longer orbit `u` to the
/// shorter orbit `v`; cycle edges are loops with `u == v`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GiantEdge {
    pub u: usize,
    pub v: usize,
    pub kind: GiantEdgeKind,
    pub label: usize,
}

/// What an edge orbit contributes to a backbone graph.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrbitShape {
    Edge(GiantEdge),
    Split(usize),
}

/// Giant edge or split flag carried by the orbit containing the pair `{x, y}`.
pub fn shape_of_pair(decomp: &CycleDecomposition, x: usize, y: usize) -> OrbitShape {
    let (ox, oy) = (decomp.orbit_of(x), decomp.orbit_of(y));
    let (px, py) = (decomp.position(x) as i64, decomp.position(y) as i64);
    let (mx, my) = (decomp.orbit_len(ox), decomp.orbit_len(oy));
    if ox == oy {
        let m = mx;
        let d = (py - px).rem_euclid(m as i64) as usize;
        if 2 * d == m {
            return OrbitShape::Split(ox);
        }
        let label = d.min(m - d);
        return OrbitShape::Edge(GiantEdge { u: ox, v: ox, kind: GiantEdgeKind::Cycle, label });
    }
    if mx == my {
        let (u, v, pu, pv) = if ox < oy { (ox, oy, px, py) } else { (oy, ox, py, px) };
        let label = (pv - pu).rem_euclid(mx as i64) as usize + 1;
        return OrbitShape::Edge(GiantEdge { u, v, kind: GiantEdgeKind::Matching, label });
    }
    let (u, v, pu, pv, m, l) = if mx > my { (ox, oy, px, py, mx, my) } else { (oy, ox, py, px, my, mx) };
    let label = (pv - pu).rem_euclid(gcd(m, l) as i64) as usize + 1;
    OrbitShape::Edge(GiantEdge { u, v, kind: GiantEdgeKind::Bridge, label })
}

/// Graph whose edge set is a union of complete edge orbits of σ.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrbitGraph {
    graph: BinaryGraph,
}

impl OrbitGraph {
    /// Wraps `graph` after checking that it is closed under `σ^E`.
    pub fn new(decomp: &CycleDecomposition, graph: BinaryGraph) -> Result<Self> {
        if graph.node_count() != decomp.n() {
            return Err(Error::Dimension { expected: decomp.n(), found: graph.node_count() });
        }
        let sigma = decomp.sigma();
        for (i, j) in graph.edges() {
            if !graph.has_edge(sigma.apply(i), sigma.apply(j)) {
                return Err(contract(format!(
                    "not an orbit graph: edge ({}, {}) present but its image is missing",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(Self { graph })
    }

    /// Union of the given orbits.
    pub fn from_orbits<'a>(n: usize, orbits: impl IntoIterator<Item = &'a EdgeOrbit>) -> Self {
        let mut graph = BinaryGraph::empty(n);
        for orbit in orbits {
            for idx in orbit.pair_indices() {
                graph.insert_index(idx);
            }
        }
        Self { graph }
    }

    pub fn graph(&self) -> &BinaryGraph {
        &self.graph
    }

    pub fn into_graph(self) -> BinaryGraph {
        self.graph
    }

    /// Decomposes the graph back into its edge orbits.
    pub fn orbits(&self, decomp: &CycleDecomposition) -> Vec<EdgeOrbit> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (i, j) in self.graph.edges() {
            let idx = pair_index(decomp.n(), i, j);
            if seen.contains(&idx) {
                continue;
            }
            let orbit = EdgeOrbit::trace(decomp.sigma(), (i, j));
            seen.extend(orbit.pair_indices());
            out.push(orbit);
        }
        out
    }
}

/// Edge orbits whose two node orbits and own length are all at most `k`.
pub fn orbits_up_to(sigma: &Permutation, k: usize) -> Vec<EdgeOrbit> {
    let decomp = node_cycles(sigma);
    let (orbits, _) = edge_orbits(sigma);
    filter_up_to(&decomp, orbits, k)
}

pub(crate) fn filter_up_to(decomp: &CycleDecomposition, orbits: Vec<EdgeOrbit>, k: usize) -> Vec<EdgeOrbit> {
    orbits
        .into_iter()
        .filter(|o| {
            let (i, j) = o.representative();
            o.len() <= k
                && decomp.orbit_len(decomp.orbit_of(i)) <= k
                && decomp.orbit_len(decomp.orbit_of(j)) <= k
        })
        .collect()
}

/// Orbits of length class `k` fully present in `A ∧ Bπ`, and their union.
pub fn complete_orbits(
    sigma: &Permutation,
    a: &BinaryGraph,
    b_pi: &BinaryGraph,
    k: usize,
) -> Result<(Vec<EdgeOrbit>, OrbitGraph)> {
    let inter = a.intersect(b_pi)?;
    if inter.node_count() != sigma.len() {
        return Err(Error::Dimension { expected: sigma.len(), found: inter.node_count() });
    }
    let complete: Vec<EdgeOrbit> = orbits_up_to(sigma, k)
        .into_iter()
        .filter(|o| o.pair_indices().all(|idx| inter.has_index(idx)))
        .collect();
    let h = OrbitGraph::from_orbits(sigma.len(), &complete);
    Ok((complete, h))
}

/// Labeled multigraph on node orbits summarising an orbit graph.
///
/// Node ids are orbit ids of the underlying decomposition; the giant nodes
/// are the orbits of length at most `k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BackboneGraph {
    node_len: Vec<usize>,
    k: usize,
    split: Vec<bool>,
    edges: Vec<GiantEdge>,
}

impl BackboneGraph {
    /// Backbone with no edges or splits over orbits with the given lengths.
    pub fn empty(node_len: Vec<usize>, k: usize) -> Self {
        let split = vec![false; node_len.len()];
        Self { node_len, k, split, edges: Vec::new() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn node_len(&self, id: usize) -> usize {
        self.node_len[id]
    }

    pub fn node_lengths(&self) -> &[usize] {
        &self.node_len
    }

    /// Ids of giant nodes (orbits of length at most `k`).
    pub fn giant_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_len.len()).filter(|&id| self.node_len[id] <= self.k)
    }

    /// Giant nodes of length exactly `m`.
    pub fn nodes_of_len(&self, m: usize) -> Vec<usize> {
        (0..self.node_len.len()).filter(|&id| self.node_len[id] == m).collect()
    }

    pub fn is_split(&self, id: usize) -> bool {
        self.split[id]
    }

    pub fn split_count(&self) -> usize {
        self.split.iter().filter(|&&s| s).count()
    }

    /// Edges in canonical (sorted) order.
    pub fn edges(&self) -> &[GiantEdge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.split_count() == 0
    }

    /// Label range allowed for an edge of this kind between these nodes,
    /// or `None` when the kind does not fit the node lengths.
    pub fn label_range(&self, kind: GiantEdgeKind, u: usize, v: usize) -> Option<usize> {
        let (mu, mv) = (self.node_len[u], self.node_len[v]);
        match kind {
            GiantEdgeKind::Matching if u < v && mu == mv => Some(mu),
            GiantEdgeKind::Bridge if mu > mv => Some(gcd(mu, mv)),
            GiantEdgeKind::Cycle if u == v => Some((mu - 1) / 2),
            _ => None,
        }
    }

    fn check_edge(&self, e: &GiantEdge) -> Result<()> {
        let ids = self.node_len.len();
        if e.u >= ids || e.v >= ids || self.node_len[e.u] > self.k || self.node_len[e.v] > self.k {
            return Err(contract(format!("giant edge {e:?} leaves the giant nodes")));
        }
        match self.label_range(e.kind, e.u, e.v) {
            Some(r) if (1..=r).contains(&e.label) => Ok(()),
            _ => Err(contract(format!("giant edge {e:?} has an invalid kind or label"))),
        }
    }

    /// Inserts an edge in canonical position; returns `false` if it was present.
    pub fn add_edge(&mut self, e: GiantEdge) -> Result<bool> {
        self.check_edge(&e)?;
        match self.edges.binary_search(&e) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.edges.insert(pos, e);
                Ok(true)
            }
        }
    }

    pub fn remove_edge(&mut self, e: &GiantEdge) -> bool {
        match self.edges.binary_search(e) {
            Ok(pos) => {
                self.edges.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn has_edge(&self, e: &GiantEdge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// Marks `id` as split; returns `false` if it already was.
    pub fn set_split(&mut self, id: usize) -> Result<bool> {
        let m = self.node_len[id];
        if !m.is_multiple_of(2) || m > self.k {
            return Err(contract(format!("orbit {} of length {m} cannot split", id + 1)));
        }
        Ok(!std::mem::replace(&mut self.split[id], true))
    }

    pub fn clear_split(&mut self, id: usize) {
        self.split[id] = false;
    }

    /// Matching edges and loops among nodes of length `m`.
    pub fn level_edges(&self, m: usize) -> impl Iterator<Item = &GiantEdge> + '_ {
        self.edges
            .iter()
            .filter(move |e| e.kind != GiantEdgeKind::Bridge && self.node_len[e.u] == m)
    }

    pub fn bridges(&self) -> impl Iterator<Item = &GiantEdge> + '_ {
        self.edges.iter().filter(|e| e.kind == GiantEdgeKind::Bridge)
    }

    /// Connected components of `Γ_m` (nodes of length `m` with their
    /// matching edges and loops), each sorted, ordered by smallest id.
    pub fn level_components(&self, m: usize) -> Vec<Vec<usize>> {
        let ids = self.node_len.len();
        let mut uf = ExcessUnionFind::new(ids);
        for e in self.level_edges(m) {
            uf.add_edge(e.u, e.v);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; ids];
        for id in self.nodes_of_len(m) {
            let r = uf.find(id);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(id);
        }
        groups
    }

    /// Builds the orbit graph this backbone describes.
    pub fn reconstruct(&self, decomp: &CycleDecomposition) -> Result<OrbitGraph> {
        if decomp.lengths() != self.node_len {
            return Err(contract("backbone does not match the permutation's orbits"));
        }
        let mut graph = BinaryGraph::empty(decomp.n());
        for (id, &s) in self.split.iter().enumerate() {
            if s {
                let m = self.node_len[id];
                for t in 0..m / 2 {
                    graph.insert(decomp.element(id, t), decomp.element(id, t + m / 2));
                }
            }
        }
        for e in &self.edges {
            let m = self.node_len[e.u];
            match e.kind {
                GiantEdgeKind::Matching => {
                    for t in 0..m {
                        graph.insert(decomp.element(e.u, t), decomp.element(e.v, t + e.label - 1));
                    }
                }
                GiantEdgeKind::Bridge => {
                    let l = self.node_len[e.v];
                    for t in 0..lcm(m, l) {
                        graph.insert(decomp.element(e.u, t), decomp.element(e.v, t + e.label - 1));
                    }
                }
                GiantEdgeKind::Cycle => {
                    for t in 0..m {
                        graph.insert(decomp.element(e.u, t), decomp.element(e.u, t + e.label));
                    }
                }
            }
        }
        Ok(OrbitGraph { graph })
    }

    /// Human-readable listing with 1-based node ids.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for id in self.giant_nodes() {
            out.push_str(&format!(
                "node {} len={}{}\n",
                id + 1,
                self.node_len[id],
                if self.split[id] { " split" } else { "" }
            ));
        }
        for e in &self.edges {
            let tag = match e.kind {
                GiantEdgeKind::Matching => 'M',
                GiantEdgeKind::Bridge => 'B',
                GiantEdgeKind::Cycle => 'C',
            };
            out.push_str(&format!("edge {tag} {} {} label={}\n", e.u + 1, e.v + 1, e.label));
        }
        out
    }
}

/// Backbone graph of an orbit graph whose orbits all lie in `O_k`.
pub fn backbone(decomp: &CycleDecomposition, h: &OrbitGraph, k: usize) -> Result<BackboneGraph> {
    let h = OrbitGraph::new(decomp, h.graph.clone())?;
    let mut bb = BackboneGraph::empty(decomp.lengths(), k);
    for orbit in h.orbits(decomp) {
        let (i, j) = orbit.representative();
        if orbit.len() > k
            || decomp.orbit_len(decomp.orbit_of(i)) > k
            || decomp.orbit_len(decomp.orbit_of(j)) > k
        {
            return Err(contract(format!(
                "orbit {} is not in O_{k}",
                orbit.display_one_based()
            )));
        }
        match shape_of_pair(decomp, i, j) {
            OrbitShape::Split(id) => {
                bb.set_split(id)?;
            }
            OrbitShape::Edge(e) => {
                bb.add_edge(e)?;
            }
        }
    }
    Ok(bb)
}

/// Size of one connected component (over non-isolated vertices).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ComponentExcess {
    pub vertices: usize,
    pub edges: usize,
}

impl ComponentExcess {
    pub fn excess(&self) -> i64 {
        self.edges as i64 - self.vertices as i64
    }
}

/// Components of `g` that contain at least one edge.
pub fn components(g: &BinaryGraph) -> Vec<ComponentExcess> {
    let n = g.node_count();
    let mut uf = ExcessUnionFind::new(n);
    let mut touched = vec![false; n];
    for (i, j) in g.edges() {
        uf.add_edge(i, j);
        touched[i] = true;
        touched[j] = true;
    }
    let mut roots = BTreeSet::new();
    for x in 0..n {
        if touched[x] {
            roots.insert(uf.find(x));
        }
    }
    roots
        .into_iter()
        .map(|r| ComponentExcess { vertices: uf.vertices(r), edges: uf.edges(r) })
        .collect()
}

/// `e(G) − |V(G)|` over non-isolated vertices.
pub fn excess(g: &BinaryGraph) -> i64 {
    components(g).iter().map(ComponentExcess::excess).sum()
}

/// `e(G) − n`.
pub fn excess_whole(g: &BinaryGraph) -> i64 {
    g.edge_count() as i64 - g.node_count() as i64
}

pub fn is_forest(g: &BinaryGraph) -> bool {
    components(g).iter().all(|c| c.excess() < 0)
}

pub fn is_pseudoforest(g: &BinaryGraph) -> bool {
    components(g).iter().all(|c| c.excess() <= 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_sigma() -> Permutation {
        Permutation::parse_cycles("(12)(34)(5678)", None).unwrap()
    }

    #[test]
    fn table_census() {
        let (orbits, census) = edge_orbits(&table_sigma());
        assert_eq!(orbits.len(), 10);
        assert_eq!((census.count(1), census.count(2), census.count(4)), (2, 3, 5));
        assert_eq!(census.total_edges(), 28);
    }

    #[test]
    fn edge_permutation_examples() {
        let sigma = table_sigma();
        let map = edge_permutation(&sigma);
        assert_eq!(map[pair_index(8, 4, 5)], pair_index(8, 5, 6));
        assert_eq!(map[pair_index(8, 0, 1)], pair_index(8, 0, 1));
    }

    #[test]
    fn classify_examples() {
        let sigma = table_sigma();
        let decomp = node_cycles(&sigma);
        let (orbits, _) = edge_orbits(&sigma);
        let find = |i: usize, j: usize| {
            orbits.iter().find(|o| o.edges().contains(&(i - 1, j - 1))).unwrap().clone()
        };
        assert_eq!(classify_orbit(&decomp, &find(1, 3)).unwrap(), OrbitClass::Matching { m: 2 });
        let b = find(1, 5);
        assert_eq!(classify_orbit(&decomp, &b).unwrap(), OrbitClass::Bridge { m: 4, l: 2 });
        assert_eq!(b.len(), 4);
        assert_eq!(classify_orbit(&decomp, &find(5, 7)).unwrap(), OrbitClass::Split { m: 4 });
        assert_eq!(classify_orbit(&decomp, &find(1, 2)).unwrap(), OrbitClass::Split { m: 2 });
        assert_eq!(classify_orbit(&decomp, &find(5, 6)).unwrap(), OrbitClass::Cycle { m: 4 });
    }

    #[test]
    fn classify_rejects_non_orbit() {
        let sigma = table_sigma();
        let decomp = node_cycles(&sigma);
        let other = Permutation::identity(8);
        let (orbits, _) = edge_orbits(&other);
        assert!(classify_orbit(&decomp, &orbits[pair_index(8, 4, 5)]).is_err());
    }

    #[test]
    fn matching_labels_follow_offset() {
        let sigma = table_sigma();
        let decomp = node_cycles(&sigma);
        assert_eq!(
            shape_of_pair(&decomp, 0, 2),
            OrbitShape::Edge(GiantEdge { u: 0, v: 1, kind: GiantEdgeKind::Matching, label: 1 })
        );
        assert_eq!(
            shape_of_pair(&decomp, 0, 3),
            OrbitShape::Edge(GiantEdge { u: 0, v: 1, kind: GiantEdgeKind::Matching, label: 2 })
        );
    }

    #[test]
    fn predicates_on_small_graphs() {
        let tri = BinaryGraph::from_edges(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(is_pseudoforest(&tri) && !is_forest(&tri));
        assert_eq!(excess(&tri), 0);
        let diamond = BinaryGraph::from_edges(4, [(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert!(!is_pseudoforest(&diamond));
        let path = BinaryGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(excess(&path), -1);
        assert_eq!(excess_whole(&path), -2);
        let empty = BinaryGraph::empty(3);
        assert!(is_forest(&empty) && is_pseudoforest(&empty));
    }

    #[test]
    fn cycle_type_round_trip() {
        let ct = CycleType::parse("0,2,0,1").unwrap();
        assert_eq!(ct.n(), 8);
        assert_eq!(ct.lengths(), vec![2, 2, 4]);
        assert_eq!(node_cycles(&ct.canonical_permutation()).cycle_type(), ct);
        assert_eq!(ct.to_string(), "0,2,0,1,0,0,0,0");
    }
}
