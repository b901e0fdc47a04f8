//! Counting and generating backbone forests and pseudoforests.
//!
//! Both generators work level by level. At level `t` the nodes are the node
//! orbits of length `t`; a level first receives matching edges (and, for
//! pseudoforests, loops), then splits, then bridges down to shorter orbits,
//! and for pseudoforests also bridges arriving from orbits of length `2t`.
//! Stage choices are made on tree components only, so the stream never
//! exceeds the product bound of [`ConstructionParams::pseudoforest_bound`]
//! (resp. [`ConstructionParams::forest_bound`]).
//!
//! The generators over-generate: every emission carries the verdict of the
//! matching validator instead of being filtered out.

use crate::dsu::ExcessUnionFind;
use crate::error::{contract, Error, Result};
use crate::orbit::{gcd, lcm, BackboneGraph, CycleDecomposition, CycleType, GiantEdge, GiantEdgeKind};
use std::collections::BTreeSet;
use std::fmt;

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let lf = |x: usize| (2..=x).map(|v| (v as f64).ln()).sum::<f64>();
    lf(n) - lf(k) - lf(n - k)
}

/// Rooted forests on `n` labeled nodes with `a` edges: `C(n−1, a)·n^a`.
pub fn count_rooted_forests(n: usize, a: usize) -> Result<u128> {
    if n == 0 {
        return if a == 0 { Ok(1) } else { Err(Error::Domain("no edges fit on zero nodes".into())) };
    }
    if a > n - 1 {
        return Err(Error::Domain(format!("a forest on {n} nodes has at most {} edges, got {a}", n - 1)));
    }
    Ok(binomial_u128(n - 1, a) * (n as u128).pow(a as u32))
}

/// Upper bound `C(n, a)·(2n)^a` on rooted pseudoforests with loops and
/// multi-edges allowed.
pub fn pseudoforest_count_bound(n: usize, a: usize) -> u128 {
    binomial_u128(n, a) * (2 * n as u128).pow(a as u32)
}

/// Per-level stage sizes: `a_t` edges, `b_t` split components, `c_t`
/// bridges to shorter orbits, `d_t` bridges from orbits of length `2t`.
/// Index `t − 1` holds level `t`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ConstructionParams {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub d: Vec<usize>,
}

impl ConstructionParams {
    pub fn zeros(k: usize) -> Self {
        Self { a: vec![0; k], b: vec![0; k], c: vec![0; k], d: vec![0; k] }
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    fn at(v: &[usize], t: usize) -> usize {
        v.get(t - 1).copied().unwrap_or(0)
    }

    /// Parses `a_1,…;b_1,…;c_1,…;d_1,…`; missing lists are zero.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let mut lists: Vec<Vec<usize>> = Vec::new();
        for part in text.split(';') {
            let part = part.trim();
            let part = part.split_once('=').map_or(part, |(_, v)| v);
            if part.is_empty() {
                lists.push(Vec::new());
                continue;
            }
            let nums: Vec<usize> = part
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("bad parameter list {part:?}")))?;
            if nums.len() > k {
                return Err(Error::Parse(format!("parameter list {part:?} is longer than k = {k}")));
            }
            lists.push(nums);
        }
        if lists.len() > 4 {
            return Err(Error::Parse("expected at most four lists a;b;c;d".into()));
        }
        lists.resize(4, Vec::new());
        let pad = |v: &Vec<usize>| {
            let mut v = v.clone();
            v.resize(k, 0);
            v
        };
        Ok(Self { a: pad(&lists[0]), b: pad(&lists[1]), c: pad(&lists[2]), d: pad(&lists[3]) })
    }

    /// Stage sizes fit the orbit counts: splits only at even levels,
    /// backward bridges only when `2t ≤ k`, and enough tree components.
    pub fn feasible(&self, ct: &CycleType, forest: bool) -> bool {
        let k = self.k();
        (1..=k).all(|t| {
            let (a, b, c, d) = (Self::at(&self.a, t), Self::at(&self.b, t), Self::at(&self.c, t), Self::at(&self.d, t));
            let nt = ct.count(t);
            let edges_ok = if forest { a == 0 || a < nt } else { a <= nt };
            edges_ok
                && (t % 2 == 0 || b == 0)
                && (2 * t <= k || d == 0)
                && (!forest || d == 0)
                && a + b + c + d <= nt
        })
    }

    /// `∏_t C(n_t; a,b,c) (t n_t)^a (Σ_{ℓ<t} ℓ n_ℓ)^c`.
    pub fn forest_bound(&self, ct: &CycleType) -> f64 {
        let mut log_total = 0.0;
        for t in 1..=self.k() {
            let (a, b, c) = (Self::at(&self.a, t), Self::at(&self.b, t), Self::at(&self.c, t));
            if t % 2 == 1 && b > 0 {
                return 0.0;
            }
            let nt = ct.count(t);
            if a + b + c > nt {
                return 0.0;
            }
            let lower: usize = (1..t).map(|l| l * ct.count(l)).sum();
            log_total += ln_binomial(nt, a) + ln_binomial(nt - a, b) + ln_binomial(nt - a - b, c)
                + pow_ln(t * nt, a)
                + pow_ln(lower, c);
        }
        log_total.exp()
    }

    /// `∏_t C(n_t; a,b,c,d) (2t n_t)^a n_t^b (Σ_{ℓ<t} ℓ n_ℓ)^c (t n_{2t})^d`.
    pub fn pseudoforest_bound(&self, ct: &CycleType) -> f64 {
        let k = self.k();
        let mut log_total = 0.0;
        for t in 1..=k {
            let (a, b, c, d) = (Self::at(&self.a, t), Self::at(&self.b, t), Self::at(&self.c, t), Self::at(&self.d, t));
            if (t % 2 == 1 && b > 0) || (2 * t > k && d > 0) {
                return 0.0;
            }
            let nt = ct.count(t);
            if a + b + c + d > nt {
                return 0.0;
            }
            let lower: usize = (1..t).map(|l| l * ct.count(l)).sum();
            log_total += ln_binomial(nt, a)
                + ln_binomial(nt - a, b)
                + ln_binomial(nt - a - b, c)
                + ln_binomial(nt - a - b - c, d)
                + pow_ln(2 * t * nt, a)
                + pow_ln(nt, b)
                + pow_ln(lower, c)
                + pow_ln(t * ct.count(2 * t), d);
        }
        log_total.exp()
    }

    /// Stage sizes that let the pseudoforest generator produce `bb`.
    pub fn for_pseudoforest(bb: &BackboneGraph) -> Self {
        let k = bb.k();
        let mut params = Self::zeros(k);
        let info = LevelInfo::new(bb);
        for t in 1..=k {
            params.a[t - 1] = bb.level_edges(t).count();
            params.b[t - 1] = info.components[t]
                .iter()
                .filter(|comp| comp.iter().any(|&x| bb.is_split(x)))
                .count();
        }
        for e in bb.bridges() {
            let m = bb.node_len(e.u);
            if info.is_double(bb, e) {
                if m.is_multiple_of(2) && m / 2 >= 1 {
                    params.d[m / 2 - 1] += 1;
                }
            } else {
                params.c[m - 1] += 1;
            }
        }
        params
    }

    /// Stage sizes that let the forest generator produce `bb`.
    pub fn for_forest(bb: &BackboneGraph) -> Self {
        let k = bb.k();
        let mut params = Self::zeros(k);
        for t in 1..=k {
            params.a[t - 1] = bb.level_edges(t).count();
            params.b[t - 1] = bb.nodes_of_len(t).iter().filter(|&&x| bb.is_split(x)).count();
        }
        for e in bb.bridges() {
            params.c[bb.node_len(e.u) - 1] += 1;
        }
        params
    }
}

fn pow_ln(base: usize, exp: usize) -> f64 {
    if exp == 0 {
        0.0
    } else if base == 0 {
        f64::NEG_INFINITY
    } else {
        exp as f64 * (base as f64).ln()
    }
}

impl fmt::Display for ConstructionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "a={};b={};c={};d={}", join(&self.a), join(&self.b), join(&self.c), join(&self.d))
    }
}

/// Components of every level of a backbone.
struct LevelInfo {
    /// `components[m]`: components of `Γ_m`.
    components: Vec<Vec<Vec<usize>>>,
    /// Component index of each node within its level.
    comp_of: Vec<usize>,
    /// Edge count (matchings and loops) of each component, aligned with `components`.
    comp_edges: Vec<Vec<usize>>,
    /// Bridges leaving each component to shorter orbits.
    lower_bridges: Vec<Vec<Vec<GiantEdge>>>,
}

impl LevelInfo {
    fn new(bb: &BackboneGraph) -> Self {
        let k = bb.k();
        let ids = bb.node_lengths().len();
        let mut components = vec![Vec::new(); k + 1];
        let mut comp_of = vec![usize::MAX; ids];
        let mut comp_edges = vec![Vec::new(); k + 1];
        let mut lower_bridges = vec![Vec::new(); k + 1];
        for m in 1..=k {
            components[m] = bb.level_components(m);
            for (ci, comp) in components[m].iter().enumerate() {
                for &x in comp {
                    comp_of[x] = ci;
                }
            }
            comp_edges[m] = vec![0; components[m].len()];
            lower_bridges[m] = vec![Vec::new(); components[m].len()];
            for e in bb.level_edges(m) {
                comp_edges[m][comp_of[e.u]] += 1;
            }
        }
        for e in bb.bridges() {
            let m = bb.node_len(e.u);
            lower_bridges[m][comp_of[e.u]].push(*e);
        }
        Self { components, comp_of, comp_edges, lower_bridges }
    }

    fn component(&self, bb: &BackboneGraph, x: usize) -> (usize, usize) {
        (bb.node_len(x), self.comp_of[x])
    }

    fn is_tree(&self, m: usize, ci: usize) -> bool {
        self.comp_edges[m][ci] < self.components[m][ci].len()
    }

    fn splits(&self, bb: &BackboneGraph, m: usize, ci: usize) -> usize {
        self.components[m][ci].iter().filter(|&&x| bb.is_split(x)).count()
    }

    fn is_plain_tree(&self, bb: &BackboneGraph, m: usize, ci: usize) -> bool {
        self.is_tree(m, ci) && self.splits(bb, m, ci) == 0 && self.lower_bridges[m][ci].is_empty()
    }

    /// A lower bridge whose starting component also carries a split or
    /// another lower bridge.
    fn is_double(&self, bb: &BackboneGraph, e: &GiantEdge) -> bool {
        let (m, ci) = self.component(bb, e.u);
        self.splits(bb, m, ci) > 0 || self.lower_bridges[m][ci].len() > 1
    }
}

/// Structural conditions checked by the validators.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Condition {
    /// Each level is a forest with simple edges.
    T1,
    /// Bridges only between lengths `ℓ | m`.
    T2,
    /// No loops.
    T3,
    /// Each component has at most one split or one lower bridge, not both.
    T4,
    /// Each level is a pseudoforest; loops and parallel edges count as cycles.
    P1,
    /// Bridges only between lengths `ℓ | m`.
    P2,
    /// Unicyclic components are plain.
    P3,
    /// A tree component has at most two splits.
    P4,
    /// Two lower bridges from one tree component go to length `m/2`.
    P5,
    /// A lower bridge from a split tree component goes to a plain tree at length `m/2`.
    P6,
    /// Distinct endpoints of such bridges lie in distinct plain tree components.
    P7,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub condition: Condition,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, c: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == c)
    }

    fn push(&mut self, condition: Condition, detail: String) {
        self.violations.push(Violation { condition, detail });
    }
}

/// Checks the forest conditions on a backbone.
pub fn validate_forest(bb: &BackboneGraph) -> Validation {
    let mut out = Validation::default();
    let info = LevelInfo::new(bb);
    for m in 1..=bb.k() {
        let mut uf = ExcessUnionFind::new(bb.node_lengths().len());
        let mut pairs = BTreeSet::new();
        for e in bb.level_edges(m) {
            if e.kind == GiantEdgeKind::Cycle {
                continue;
            }
            if !pairs.insert((e.u, e.v)) {
                out.push(Condition::T1, format!("parallel giant edges between {} and {}", e.u + 1, e.v + 1));
            } else if uf.same(e.u, e.v) {
                out.push(Condition::T1, format!("cycle through giant edge {}-{}", e.u + 1, e.v + 1));
            }
            uf.add_edge(e.u, e.v);
        }
        for (ci, comp) in info.components[m].iter().enumerate() {
            let splits = info.splits(bb, m, ci);
            let bridges = info.lower_bridges[m][ci].len();
            if splits + bridges > 1 {
                out.push(
                    Condition::T4,
                    format!("component of {} at length {m} has {splits} splits and {bridges} lower bridges", comp[0] + 1),
                );
            }
        }
    }
    for e in bb.edges() {
        match e.kind {
            GiantEdgeKind::Cycle => out.push(Condition::T3, format!("loop at {}", e.u + 1)),
            GiantEdgeKind::Bridge => {
                let (m, l) = (bb.node_len(e.u), bb.node_len(e.v));
                if m % l != 0 {
                    out.push(Condition::T2, format!("bridge {}-{} joins lengths {m} and {l}", e.u + 1, e.v + 1));
                }
            }
            GiantEdgeKind::Matching => {}
        }
    }
    out
}

/// Checks the pseudoforest conditions on a backbone.
pub fn validate_pseudoforest(bb: &BackboneGraph) -> Validation {
    let mut out = Validation::default();
    let info = LevelInfo::new(bb);
    for e in bb.bridges() {
        let (m, l) = (bb.node_len(e.u), bb.node_len(e.v));
        if m % l != 0 {
            out.push(Condition::P2, format!("bridge {}-{} joins lengths {m} and {l}", e.u + 1, e.v + 1));
        }
    }
    for m in 1..=bb.k() {
        let mut doubles: Vec<GiantEdge> = Vec::new();
        for (ci, comp) in info.components[m].iter().enumerate() {
            let name = comp[0] + 1;
            let edges = info.comp_edges[m][ci];
            let splits = info.splits(bb, m, ci);
            let lower = &info.lower_bridges[m][ci];
            if edges > comp.len() {
                out.push(Condition::P1, format!("component of {name} at length {m} has {edges} edges on {} nodes", comp.len()));
                continue;
            }
            if edges == comp.len() {
                if splits > 0 || !lower.is_empty() {
                    out.push(Condition::P3, format!("unicyclic component of {name} at length {m} is not plain"));
                }
                continue;
            }
            if splits > 2 {
                out.push(Condition::P4, format!("tree component of {name} at length {m} has {splits} splits"));
            }
            if lower.len() >= 2 && lower.iter().any(|e| 2 * bb.node_len(e.v) != m) {
                out.push(Condition::P5, format!("tree component of {name} at length {m} has bridges not ending at length m/2"));
            }
            if splits > 0 {
                for e in lower {
                    let l = bb.node_len(e.v);
                    let (vm, vc) = info.component(bb, e.v);
                    if 2 * l != m || !info.is_plain_tree(bb, vm, vc) {
                        out.push(
                            Condition::P6,
                            format!("bridge {}-{} leaves a split component without ending in a plain tree at length m/2", e.u + 1, e.v + 1),
                        );
                    }
                }
            }
            if splits > 0 || lower.len() > 1 {
                doubles.extend(lower.iter().copied());
            }
        }
        for (i, e) in doubles.iter().enumerate() {
            for f in &doubles[i + 1..] {
                if e.v == f.v {
                    continue;
                }
                let (em, ec) = info.component(bb, e.v);
                let (fm, fc) = info.component(bb, f.v);
                let distinct = (em, ec) != (fm, fc);
                if !distinct || !info.is_plain_tree(bb, em, ec) || !info.is_plain_tree(bb, fm, fc) {
                    out.push(
                        Condition::P7,
                        format!("bridges ending at {} and {} do not end in distinct plain trees", e.v + 1, f.v + 1),
                    );
                }
            }
        }
    }
    out
}

/// One level's worth of additions to a backbone.
#[derive(Clone, Debug, Default)]
struct Decoration {
    edges: Vec<GiantEdge>,
    splits: Vec<usize>,
}

/// Totals of a generator run.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct StreamSummary {
    pub emitted: u64,
    pub valid: u64,
    /// Combinations dropped because two stages produced the same giant edge.
    pub duplicates: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Forest,
    Pseudoforest,
}

/// Labeled edge sets on `nodes` with exactly `count` edges whose components
/// satisfy the family's cycle rule.
fn level_graphs(nodes: &[usize], t: usize, count: usize, family: Family) -> Vec<Vec<GiantEdge>> {
    let mut candidates = Vec::new();
    for (i, &u) in nodes.iter().enumerate() {
        for &v in &nodes[i + 1..] {
            for label in 1..=t {
                candidates.push(GiantEdge { u, v, kind: GiantEdgeKind::Matching, label });
            }
        }
    }
    if family == Family::Pseudoforest {
        for &u in nodes {
            for label in 1..=(t - 1) / 2 {
                candidates.push(GiantEdge { u, v: u, kind: GiantEdgeKind::Cycle, label });
            }
        }
    }
    let local = |x: usize| nodes.binary_search(&x).expect("edge endpoint is a level node");
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        cands: &[GiantEdge],
        next: usize,
        left: usize,
        uf: ExcessUnionFind,
        family: Family,
        local: &dyn Fn(usize) -> usize,
        chosen: &mut Vec<GiantEdge>,
        out: &mut Vec<Vec<GiantEdge>>,
    ) {
        if left == 0 {
            out.push(chosen.clone());
            return;
        }
        if cands.len() - next < left {
            return;
        }
        let e = cands[next];
        let (x, y) = (local(e.u), local(e.v));
        let mut with = uf.clone();
        let admissible = match family {
            Family::Forest => !with.same(x, y),
            Family::Pseudoforest => {
                let r = with.add_edge(x, y);
                with.excess(r) <= 0
            }
        };
        if admissible {
            if family == Family::Forest {
                with.add_edge(x, y);
            }
            chosen.push(e);
            dfs(cands, next + 1, left - 1, with, family, local, chosen, out);
            chosen.pop();
        }
        dfs(cands, next + 1, left, uf, family, local, chosen, out);
    }
    dfs(&candidates, 0, count, ExcessUnionFind::new(nodes.len()), family, &local, &mut chosen, &mut out);
    out
}

/// Tree components of the level graph, as sorted node lists ordered by smallest id.
fn tree_components(nodes: &[usize], edges: &[GiantEdge]) -> Vec<Vec<usize>> {
    let local = |x: usize| nodes.binary_search(&x).expect("level node");
    let mut uf = ExcessUnionFind::new(nodes.len());
    for e in edges {
        uf.add_edge(local(e.u), local(e.v));
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, &x) in nodes.iter().enumerate() {
        let r = uf.find(i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(x),
            None => groups.push((r, vec![x])),
        }
    }
    groups
        .into_iter()
        .filter(|(r, _)| uf.excess(*r) < 0)
        .map(|(_, g)| g)
        .collect()
}

/// Visits every way of picking disjoint `sizes[0]`, `sizes[1]`, … element
/// subsets of `0..count`, in lexicographic order.
fn disjoint_choices(count: usize, sizes: &[usize], visit: &mut dyn FnMut(&[Vec<usize>])) {
    fn pick(
        count: usize,
        sizes: &[usize],
        used: &mut Vec<bool>,
        groups: &mut Vec<Vec<usize>>,
        start: usize,
        visit: &mut dyn FnMut(&[Vec<usize>]),
    ) {
        let g = groups.len() - 1;
        if groups[g].len() == sizes[g] {
            if g + 1 == sizes.len() {
                visit(groups);
            } else {
                groups.push(Vec::new());
                pick(count, sizes, used, groups, 0, visit);
                groups.pop();
            }
            return;
        }
        for i in start..count {
            if used[i] {
                continue;
            }
            used[i] = true;
            groups[g].push(i);
            pick(count, sizes, used, groups, i + 1, visit);
            groups[g].pop();
            used[i] = false;
        }
    }
    if sizes.is_empty() {
        visit(&[]);
        return;
    }
    let mut used = vec![false; count];
    let mut groups = vec![Vec::new()];
    pick(count, sizes, &mut used, &mut groups, 0, visit);
}

/// Cartesian product of per-slot alternatives.
fn product(slots: &[Vec<Decoration>], visit: &mut dyn FnMut(&Decoration)) {
    fn go(slots: &[Vec<Decoration>], i: usize, acc: &mut Decoration, visit: &mut dyn FnMut(&Decoration)) {
        if i == slots.len() {
            visit(acc);
            return;
        }
        for alt in &slots[i] {
            let (e0, s0) = (acc.edges.len(), acc.splits.len());
            acc.edges.extend_from_slice(&alt.edges);
            acc.splits.extend_from_slice(&alt.splits);
            go(slots, i + 1, acc, visit);
            acc.edges.truncate(e0);
            acc.splits.truncate(s0);
        }
    }
    go(slots, 0, &mut Decoration::default(), visit);
}

/// Every decoration of level `t`.
fn level_options(
    bb: &BackboneGraph,
    t: usize,
    params: &ConstructionParams,
    family: Family,
) -> Vec<Decoration> {
    let at = |v: &[usize]| ConstructionParams::at(v, t);
    let (a, b, c) = (at(&params.a), at(&params.b), at(&params.c));
    let d = if family == Family::Pseudoforest { at(&params.d) } else { 0 };
    let nodes = bb.nodes_of_len(t);
    let lower_targets: Vec<(usize, usize)> = (1..t)
        .filter(|l| t.is_multiple_of(*l))
        .flat_map(|l| bb.nodes_of_len(l).into_iter().map(move |w| (w, l)))
        .collect();
    let upper_starts = if 2 * t <= bb.k() { bb.nodes_of_len(2 * t) } else { Vec::new() };
    let mut out = Vec::new();
    for edges in level_graphs(&nodes, t, a, family) {
        let trees = tree_components(&nodes, &edges);
        disjoint_choices(trees.len(), &[b, c, d], &mut |groups| {
            let mut slots: Vec<Vec<Decoration>> = vec![vec![Decoration { edges: edges.clone(), splits: Vec::new() }]];
            for &ci in &groups[0] {
                let comp = &trees[ci];
                let mut alts = Vec::new();
                for (i, &x) in comp.iter().enumerate() {
                    alts.push(Decoration { edges: Vec::new(), splits: vec![x] });
                    if family == Family::Pseudoforest {
                        for &y in &comp[i + 1..] {
                            alts.push(Decoration { edges: Vec::new(), splits: vec![x, y] });
                        }
                    }
                }
                slots.push(alts);
            }
            for &ci in &groups[1] {
                let mut alts = Vec::new();
                for &root in &trees[ci] {
                    for &(w, l) in &lower_targets {
                        for label in 1..=l {
                            let e = GiantEdge { u: root, v: w, kind: GiantEdgeKind::Bridge, label };
                            alts.push(Decoration { edges: vec![e], splits: Vec::new() });
                        }
                    }
                }
                slots.push(alts);
            }
            for &ci in &groups[2] {
                let mut alts = Vec::new();
                for &root in &trees[ci] {
                    for &u in &upper_starts {
                        for label in 1..=t {
                            let e = GiantEdge { u, v: root, kind: GiantEdgeKind::Bridge, label };
                            alts.push(Decoration { edges: vec![e], splits: Vec::new() });
                        }
                    }
                }
                slots.push(alts);
            }
            product(&slots, &mut |dec| out.push(dec.clone()));
        });
    }
    out
}

fn run_stream(
    node_len: &[usize],
    k: usize,
    params: &ConstructionParams,
    family: Family,
    visit: &mut dyn FnMut(&BackboneGraph, bool),
) -> StreamSummary {
    let ct = CycleType::from_lengths(node_len);
    let mut summary = StreamSummary::default();
    if params.k() != k || !params.feasible(&ct, family == Family::Forest) {
        return summary;
    }
    let base = BackboneGraph::empty(node_len.to_vec(), k);
    let levels: Vec<Vec<Decoration>> = (1..=k).map(|t| level_options(&base, t, params, family)).collect();

    fn go(
        levels: &[Vec<Decoration>],
        i: usize,
        bb: &mut BackboneGraph,
        family: Family,
        summary: &mut StreamSummary,
        visit: &mut dyn FnMut(&BackboneGraph, bool),
    ) {
        if i == levels.len() {
            let valid = match family {
                Family::Forest => validate_forest(bb).ok(),
                Family::Pseudoforest => validate_pseudoforest(bb).ok(),
            };
            summary.emitted += 1;
            summary.valid += valid as u64;
            visit(bb, valid);
            return;
        }
        for dec in &levels[i] {
            let mut added = Vec::with_capacity(dec.edges.len());
            let mut clash = false;
            for e in &dec.edges {
                if bb.add_edge(*e).expect("generated edges respect label ranges") {
                    added.push(*e);
                } else {
                    clash = true;
                    break;
                }
            }
            if clash {
                summary.duplicates += 1;
            } else {
                for &x in &dec.splits {
                    bb.set_split(x).expect("generated splits sit on even orbits");
                }
                go(levels, i + 1, bb, family, summary, visit);
                for &x in &dec.splits {
                    bb.clear_split(x);
                }
            }
            for e in &added {
                bb.remove_edge(e);
            }
        }
    }
    let mut bb = base;
    go(&levels, 0, &mut bb, family, &mut summary, visit);
    summary
}

/// Forest generator over orbits with the given lengths (indexed by orbit id).
pub fn algorithm1_forests(
    node_len: &[usize],
    k: usize,
    params: &ConstructionParams,
    mut visit: impl FnMut(&BackboneGraph, bool),
) -> StreamSummary {
    run_stream(node_len, k, params, Family::Forest, &mut visit)
}

/// Pseudoforest generator over orbits with the given lengths (indexed by orbit id).
pub fn algorithm2_pseudoforests(
    node_len: &[usize],
    k: usize,
    params: &ConstructionParams,
    mut visit: impl FnMut(&BackboneGraph, bool),
) -> StreamSummary {
    run_stream(node_len, k, params, Family::Pseudoforest, &mut visit)
}

/// Signature shared by the two backbone generators when called through a trait object.
pub type StreamGenerator = fn(&[usize], usize, &ConstructionParams, &mut dyn FnMut(&BackboneGraph, bool)) -> StreamSummary;

/// Collects a generator's output.
pub fn collect_stream(
    generator: StreamGenerator,
    node_len: &[usize],
    k: usize,
    params: &ConstructionParams,
) -> (Vec<(BackboneGraph, bool)>, StreamSummary) {
    let mut out = Vec::new();
    let summary = generator(node_len, k, params, &mut |bb, ok| out.push((bb.clone(), ok)));
    (out, summary)
}

/// Operation applied to a component when tracking its excess.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExcessOp {
    Split { node: usize },
    Bridge { from: usize, to: usize, label: usize },
}

/// `e − v` of the orbit graph made of a level component's matchings, loops
/// and splits plus its bridges to shorter orbits; the vertices are all nodes
/// of the component's orbits and of the orbits those bridges reach.
pub fn component_excess(decomp: &CycleDecomposition, bb: &BackboneGraph, component: &[usize]) -> Result<i64> {
    let members: BTreeSet<usize> = component.iter().copied().collect();
    let m = match component.first() {
        Some(&x) => bb.node_len(x),
        None => return Err(contract("empty component")),
    };
    if component.iter().any(|&x| bb.node_len(x) != m) {
        return Err(contract("component mixes orbit lengths"));
    }
    let mut sub = BackboneGraph::empty(bb.node_lengths().to_vec(), bb.k());
    let mut orbits = members.clone();
    for &x in component {
        if bb.is_split(x) {
            sub.set_split(x)?;
        }
    }
    for e in bb.edges() {
        let keep = match e.kind {
            GiantEdgeKind::Bridge => members.contains(&e.u),
            _ => members.contains(&e.u) && members.contains(&e.v),
        };
        if keep {
            sub.add_edge(*e)?;
            orbits.insert(e.v);
        }
    }
    let edges = sub.reconstruct(decomp)?.graph().edge_count() as i64;
    let vertices: usize = orbits.iter().map(|&o| decomp.orbit_len(o)).sum();
    Ok(edges - vertices as i64)
}

/// Change of [`component_excess`] when `op` is applied to the component.
///
/// A split raises the excess by `m/2`. A bridge to an orbit of length `ℓ`
/// raises it by at least `lcm(ℓ, m) − ℓ`; anything smaller is reported as a
/// contract violation.
pub fn excess_operations_check(
    decomp: &CycleDecomposition,
    bb: &BackboneGraph,
    component: &[usize],
    op: ExcessOp,
) -> Result<i64> {
    let before = component_excess(decomp, bb, component)?;
    let mut after_bb = bb.clone();
    match op {
        ExcessOp::Split { node } => {
            if !component.contains(&node) {
                return Err(contract("split node is outside the component"));
            }
            if !after_bb.set_split(node)? {
                return Err(contract("node already split"));
            }
        }
        ExcessOp::Bridge { from, to, label } => {
            if !component.contains(&from) {
                return Err(contract("bridge starts outside the component"));
            }
            let e = GiantEdge { u: from, v: to, kind: GiantEdgeKind::Bridge, label };
            if !after_bb.add_edge(e)? {
                return Err(contract("bridge already present"));
            }
        }
    }
    let delta = component_excess(decomp, &after_bb, component)? - before;
    if let ExcessOp::Bridge { from, to, .. } = op {
        let (m, l) = (bb.node_len(from), bb.node_len(to));
        if delta < (lcm(m, l) - l) as i64 {
            return Err(contract(format!("bridge raised the excess by {delta}, below lcm - l")));
        }
    }
    Ok(delta)
}

/// Label range of a bridge between lengths `m > l`: `ℓm/lcm(ℓ, m)`.
pub fn bridge_label_range(m: usize, l: usize) -> usize {
    gcd(m, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Permutation;
    use crate::orbit::node_cycles;

    #[test]
    fn rooted_forest_counts() {
        assert_eq!(count_rooted_forests(3, 0).unwrap(), 1);
        assert_eq!(count_rooted_forests(3, 1).unwrap(), 6);
        assert_eq!(count_rooted_forests(4, 3).unwrap(), 64);
        assert!(count_rooted_forests(3, 3).is_err());
        assert_eq!(pseudoforest_count_bound(2, 2), 16);
        assert_eq!(pseudoforest_count_bound(3, 2), 108);
        assert_eq!(pseudoforest_count_bound(4, 0), 1);
    }

    #[test]
    fn zero_params_emit_the_empty_backbone() {
        let lengths = [1, 1, 2];
        let (out, summary) = collect_stream(algorithm2_pseudoforests_dyn, &lengths, 2, &ConstructionParams::zeros(2));
        assert_eq!(summary.emitted, 1);
        assert!(out[0].0.is_empty() && out[0].1);
        let (out, _) = collect_stream(algorithm1_forests_dyn, &lengths, 2, &ConstructionParams::zeros(2));
        assert_eq!(out.len(), 1);
    }

    fn algorithm1_forests_dyn(l: &[usize], k: usize, p: &ConstructionParams, v: &mut dyn FnMut(&BackboneGraph, bool)) -> StreamSummary {
        algorithm1_forests(l, k, p, v)
    }

    fn algorithm2_pseudoforests_dyn(l: &[usize], k: usize, p: &ConstructionParams, v: &mut dyn FnMut(&BackboneGraph, bool)) -> StreamSummary {
        algorithm2_pseudoforests(l, k, p, v)
    }

    #[test]
    fn two_fixed_points_one_edge() {
        let params = ConstructionParams::parse("1", 1).unwrap();
        let (out, summary) = collect_stream(algorithm1_forests_dyn, &[1, 1], 1, &params);
        assert_eq!(out.len(), 1);
        assert!(summary.emitted as f64 <= params.forest_bound(&CycleType::from_counts(&[2])));
    }

    #[test]
    fn loop_labels_respect_range() {
        let params = ConstructionParams::parse("0,0,0,0,1", 5).unwrap();
        let (out, _) = collect_stream(algorithm2_pseudoforests_dyn, &[5], 5, &params);
        let labels: Vec<usize> = out.iter().map(|(bb, _)| bb.edges()[0].label).collect();
        assert_eq!(labels, vec![1, 2]);
    }

    #[test]
    fn params_parse_and_display() {
        let p = ConstructionParams::parse("1,0;0,1;0,0;1,0", 2).unwrap();
        assert_eq!(p.to_string(), "a=1,0;b=0,1;c=0,0;d=1,0");
        assert_eq!(ConstructionParams::parse(&p.to_string(), 2).unwrap(), p);
        assert!(ConstructionParams::parse("1,2,3", 2).is_err());
    }

    #[test]
    fn split_raises_excess_by_half_length() {
        let sigma = Permutation::parse_cycles("(1234)(56)", None).unwrap();
        let decomp = node_cycles(&sigma);
        let bb = BackboneGraph::empty(decomp.lengths(), 4);
        assert_eq!(component_excess(&decomp, &bb, &[0]).unwrap(), -4);
        assert_eq!(excess_operations_check(&decomp, &bb, &[0], ExcessOp::Split { node: 0 }).unwrap(), 2);
        let bridge = ExcessOp::Bridge { from: 0, to: 1, label: 1 };
        assert_eq!(excess_operations_check(&decomp, &bb, &[0], bridge).unwrap(), 2);
    }
}
