use graphcorr::graph::pair_count;
use graphcorr::orbit::{
    backbone, census_predict_small, classify_orbit, edge_census, edge_orbits, node_cycles, orbits_up_to, EdgeOrbit,
    OrbitGraph,
};
use graphcorr::{BinaryGraph, CycleType, OrbitClass, Permutation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Connected components of the orbit's edges as (left-orbit nodes, right-orbit nodes, edge count).
fn pieces(orbit: &EdgeOrbit, side: impl Fn(usize) -> bool) -> Vec<(usize, usize, usize)> {
    let edges = orbit.edges();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(i, j) in &edges {
        adj.entry(i).or_default().push(j);
        adj.entry(j).or_default().push(i);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut stack = vec![start];
        let mut nodes = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    stack.push(y);
                    nodes.push(y);
                }
            }
        }
        let left = nodes.iter().filter(|&&x| side(x)).count();
        let set: BTreeSet<usize> = nodes.iter().copied().collect();
        let e = edges.iter().filter(|(i, _)| set.contains(i)).count();
        out.push((left, nodes.len() - left, e));
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_laws(seed in any::<u64>(), n in 2usize..=12) {
        let sigma = Permutation::uniform(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let decomp = node_cycles(&sigma);
        let (orbits, census) = edge_orbits(&sigma);
        prop_assert_eq!(orbits.iter().map(EdgeOrbit::len).sum::<usize>(), pair_count(n));
        prop_assert_eq!(census.total_edges(), pair_count(n));
        for orbit in &orbits {
            let class = classify_orbit(&decomp, orbit).unwrap();
            prop_assert_eq!(class.orbit_len(), orbit.len());
            let (i, j) = orbit.representative();
            let (oi, oj) = (decomp.orbit_of(i), decomp.orbit_of(j));
            match class {
                OrbitClass::Matching { m } => {
                    // A perfect matching between the two node orbits.
                    let parts = pieces(orbit, |x| decomp.orbit_of(x) == oi);
                    prop_assert_eq!(parts.len(), m);
                    prop_assert!(parts.iter().all(|&p| p == (1, 1, 1)));
                }
                OrbitClass::Cycle { m } => {
                    // Step d inside an m-cycle gives gcd(d, m) disjoint cycles of equal length.
                    let parts = pieces(orbit, |_| true);
                    let c = parts[0].0;
                    prop_assert!(c >= 3 && c * parts.len() == m);
                    prop_assert!(parts.iter().all(|&p| p == (c, 0, c)));
                }
                OrbitClass::Split { m } => {
                    let parts = pieces(orbit, |_| true);
                    prop_assert_eq!(parts.len(), m / 2);
                    prop_assert!(parts.iter().all(|&p| p == (2, 0, 1)));
                }
                OrbitClass::Bridge { m, l } => {
                    let long = if decomp.orbit_len(oi) == m { oi } else { oj };
                    let lcm = m * l / gcd(m, l);
                    let parts = pieces(orbit, |x| decomp.orbit_of(x) == long);
                    prop_assert_eq!(parts.len(), l * m / lcm);
                    for (a, b, e) in parts {
                        prop_assert_eq!((a, b), (lcm / l, lcm / m));
                        prop_assert_eq!(e, a * b);
                    }
                }
            }
        }
    }

    #[test]
    fn backbone_reconstruction_round_trip(seed in any::<u64>(), n in 2usize..=9, k in 1usize..=5, mask in any::<u32>()) {
        let sigma = Permutation::uniform(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let decomp = node_cycles(&sigma);
        let orbits = orbits_up_to(&sigma, k);
        let chosen = orbits.iter().enumerate().filter(|(i, _)| *i >= 32 || mask >> i & 1 == 1).map(|(_, o)| o);
        let h = OrbitGraph::from_orbits(n, chosen);
        let bb = backbone(&decomp, &h, k).unwrap();
        let rebuilt = bb.reconstruct(&decomp).unwrap();
        prop_assert_eq!(rebuilt.graph(), h.graph());
    }
}

#[test]
fn census_exhaustive_small() {
    for n in 2..=6 {
        Permutation::for_each_of_size(n, |sigma| {
            let census = edge_census(sigma);
            let weighted: usize = census.nonzero().map(|(k, c)| k * c).sum();
            assert_eq!(weighted, pair_count(n));
            assert_eq!(census_predict_small(&node_cycles(sigma).cycle_type()), (census.count(1), census.count(2)));
            let (orbits, listed) = edge_orbits(sigma);
            assert_eq!(listed, census);
            assert_eq!(orbits.len(), census.orbit_count());
        });
    }
}

#[test]
fn orbit_counts_between_fixed_node_orbits() {
    for m in 1..=5 {
        // Two m-cycles: m matchings between them, ⌊(m−1)/2⌋ cycles and one split per orbit.
        let ct = {
            let mut counts = vec![0; m];
            counts[m - 1] = 2;
            CycleType::from_counts(&counts)
        };
        let sigma = ct.canonical_permutation();
        let decomp = node_cycles(&sigma);
        let (orbits, _) = edge_orbits(&sigma);
        let mut by_class: BTreeMap<char, usize> = BTreeMap::new();
        for o in &orbits {
            *by_class.entry(classify_orbit(&decomp, o).unwrap().tag()).or_default() += 1;
        }
        assert_eq!(by_class.get(&'M').copied().unwrap_or(0), m);
        assert_eq!(by_class.get(&'C').copied().unwrap_or(0), 2 * ((m - 1) / 2));
        assert_eq!(by_class.get(&'S').copied().unwrap_or(0), if m % 2 == 0 { 2 } else { 0 });
    }
}

#[test]
fn bridges_are_acyclic_iff_length_divides() {
    for m in 2..=10 {
        for l in 1..m {
            if l + m > 10 {
                continue;
            }
            let mut counts = vec![0; m];
            counts[l - 1] += 1;
            counts[m - 1] += 1;
            let sigma = CycleType::from_counts(&counts).canonical_permutation();
            let decomp = node_cycles(&sigma);
            let (orbits, _) = edge_orbits(&sigma);
            for o in orbits {
                if let OrbitClass::Bridge { .. } = classify_orbit(&decomp, &o).unwrap() {
                    let g = OrbitGraph::from_orbits(sigma.len(), [&o]).into_graph();
                    let acyclic = graphcorr::orbit::is_forest(&g);
                    assert_eq!(acyclic, m % l == 0, "m={m} l={l}");
                }
            }
        }
    }
}

#[test]
fn selection_follows_length_bound() {
    let sigma = Permutation::parse_cycles("(12)(34)(5678)", None).unwrap();
    assert!(orbits_up_to(&sigma, 1).is_empty());
    let two: Vec<String> = orbits_up_to(&sigma, 2).iter().map(EdgeOrbit::display_one_based).collect();
    assert_eq!(two.len(), 4);
    assert!(two.contains(&"(12)".to_string()) && two.contains(&"(13,24)".to_string()));
    assert_eq!(orbits_up_to(&sigma, 4).len(), 10);
}

#[test]
fn orbit_graph_requires_closed_edge_sets() {
    let sigma = Permutation::parse_cycles("(123)", None).unwrap();
    let decomp = node_cycles(&sigma);
    let partial = BinaryGraph::from_edges(3, [(0, 1)]).unwrap();
    assert!(OrbitGraph::new(&decomp, partial).is_err());
    let full = BinaryGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    assert!(OrbitGraph::new(&decomp, full).is_ok());
}
