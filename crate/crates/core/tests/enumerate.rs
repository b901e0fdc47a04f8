use graphcorr::enumerate::{
    algorithm1_forests, algorithm2_pseudoforests, component_excess, count_rooted_forests, excess_operations_check,
    pseudoforest_count_bound, validate_forest, validate_pseudoforest, Condition, ConstructionParams, ExcessOp,
};
use graphcorr::moments::orbit_union_census;
use graphcorr::oracle::{count_rooted_forests_bruteforce, rooted_pseudoforest_bruteforce};
use graphcorr::orbit::{backbone, node_cycles, orbits_up_to, GiantEdge, GiantEdgeKind, OrbitGraph};
use graphcorr::{BackboneGraph, CycleType, Permutation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashSet};

#[test]
fn rooted_forest_formula_matches_enumeration() {
    for n in 1..=7 {
        for a in 0..n {
            assert_eq!(count_rooted_forests(n, a).unwrap(), count_rooted_forests_bruteforce(n, a), "n={n} a={a}");
        }
    }
}

#[test]
fn rooted_pseudoforests_within_bound() {
    for n in 1..=5 {
        for a in 0..=5 {
            let brute = rooted_pseudoforest_bruteforce(n, a);
            assert!(brute <= pseudoforest_count_bound(n, a), "n={n} a={a}: {brute}");
        }
    }
    assert!(rooted_pseudoforest_bruteforce(3, 2) <= 108);
}

fn bridge(u: usize, v: usize, label: usize) -> GiantEdge {
    GiantEdge { u, v, kind: GiantEdgeKind::Bridge, label }
}

fn matching(u: usize, v: usize, label: usize) -> GiantEdge {
    GiantEdge { u, v, kind: GiantEdgeKind::Matching, label }
}

#[test]
fn forest_conditions_on_small_backbones() {
    // Orbits: ids 0,1 of length 2 and ids 2,3 of length 4.
    let lengths = vec![2, 2, 4, 4];
    let empty = BackboneGraph::empty(lengths.clone(), 4);
    assert!(validate_forest(&empty).ok());
    assert!(validate_pseudoforest(&empty).ok());

    let mut tree = empty.clone();
    tree.add_edge(matching(2, 3, 1)).unwrap();
    assert!(validate_forest(&tree).ok());

    // One length-4 orbit meeting two bridges to length 2.
    let mut two_bridges = empty.clone();
    two_bridges.add_edge(bridge(2, 0, 1)).unwrap();
    two_bridges.add_edge(bridge(2, 1, 1)).unwrap();
    assert!(validate_forest(&two_bridges).violates(Condition::T4));

    let mut two_splits = tree.clone();
    two_splits.set_split(2).unwrap();
    two_splits.set_split(3).unwrap();
    assert!(validate_forest(&two_splits).violates(Condition::T4));

    let mut split_and_bridge = empty.clone();
    split_and_bridge.set_split(2).unwrap();
    split_and_bridge.add_edge(bridge(2, 0, 2)).unwrap();
    assert!(validate_forest(&split_and_bridge).violates(Condition::T4));
}

#[test]
fn pseudoforest_conditions_on_small_backbones() {
    // Three splits on a tree of length-4 orbits.
    let mut three = BackboneGraph::empty(vec![4, 4, 4], 4);
    three.add_edge(matching(0, 1, 1)).unwrap();
    three.add_edge(matching(1, 2, 1)).unwrap();
    for x in 0..3 {
        three.set_split(x).unwrap();
    }
    assert!(validate_pseudoforest(&three).violates(Condition::P4));

    // A length-4 tree with bridges to a fixed point and to a length-2 orbit.
    let mut mixed = BackboneGraph::empty(vec![1, 2, 4, 4], 4);
    mixed.add_edge(matching(2, 3, 1)).unwrap();
    mixed.add_edge(bridge(2, 0, 1)).unwrap();
    mixed.add_edge(bridge(3, 1, 1)).unwrap();
    assert!(validate_pseudoforest(&mixed).violates(Condition::P5));

    let mut looped = BackboneGraph::empty(vec![3], 3);
    looped.add_edge(GiantEdge { u: 0, v: 0, kind: GiantEdgeKind::Cycle, label: 1 }).unwrap();
    assert!(validate_pseudoforest(&looped).ok());
    assert!(validate_forest(&looped).violates(Condition::T3));
}

fn random_sigma(rng: &mut ChaCha8Rng, max_n: usize) -> Permutation {
    use rand::Rng;
    let n = rng.gen_range(2..=max_n);
    Permutation::uniform(n, rng)
}

/// Every orbit (pseudo)forest from the brute-force search, as a backbone.
fn brute_backbones(sigma: &Permutation, k: usize, forest: bool) -> Vec<BackboneGraph> {
    let decomp = node_cycles(sigma);
    let orbits = orbits_up_to(sigma, k);
    let mut out = Vec::new();
    orbit_union_census(sigma.len(), &orbits, forest, |chosen, _| {
        let h = OrbitGraph::from_orbits(sigma.len(), chosen.iter().map(|&i| &orbits[i]));
        out.push(backbone(&decomp, &h, k).unwrap());
    })
    .unwrap();
    out
}

fn containment(forest: bool, samples: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < samples {
        let sigma = random_sigma(&mut rng, 8);
        let k = 1 + (checked % 4);
        if orbits_up_to(&sigma, k).len() > 16 {
            continue;
        }
        checked += 1;
        let lengths = node_cycles(&sigma).lengths();
        let mut by_params: BTreeMap<ConstructionParams, Vec<BackboneGraph>> = BTreeMap::new();
        for bb in brute_backbones(&sigma, k, forest) {
            let verdict = if forest { validate_forest(&bb) } else { validate_pseudoforest(&bb) };
            assert!(verdict.ok(), "{sigma} k={k}: {:?}\n{}", verdict.violations, bb.describe());
            let params = if forest { ConstructionParams::for_forest(&bb) } else { ConstructionParams::for_pseudoforest(&bb) };
            by_params.entry(params).or_default().push(bb);
        }
        for (params, targets) in by_params {
            let mut seen = HashSet::new();
            let mut record = |bb: &BackboneGraph, _ok: bool| {
                seen.insert(bb.clone());
            };
            let summary = if forest {
                algorithm1_forests(&lengths, k, &params, &mut record)
            } else {
                algorithm2_pseudoforests(&lengths, k, &params, &mut record)
            };
            let ct = CycleType::from_lengths(&lengths);
            let bound = if forest { params.forest_bound(&ct) } else { params.pseudoforest_bound(&ct) };
            assert!(summary.emitted as f64 <= bound * (1.0 + 1e-9), "{sigma} {params}: {} > {bound}", summary.emitted);
            for bb in targets {
                assert!(seen.contains(&bb), "{sigma} k={k} {params}: missing\n{}", bb.describe());
            }
        }
    }
}

#[test]
fn pseudoforests_are_valid_and_generated() {
    containment(false, 60, 11);
}

#[test]
fn forests_are_valid_and_generated() {
    containment(true, 60, 12);
}

#[test]
fn plain_components_have_minimal_excess() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut components = 0usize;
    for round in 0..30 {
        let sigma = random_sigma(&mut rng, 8);
        let k = 1 + round % 4;
        if orbits_up_to(&sigma, k).len() > 16 {
            continue;
        }
        let decomp = node_cycles(&sigma);
        let lengths = decomp.lengths();
        let params: HashSet<ConstructionParams> =
            brute_backbones(&sigma, k, false).iter().map(ConstructionParams::for_pseudoforest).collect();
        for params in params {
            algorithm2_pseudoforests(&lengths, k, &params, |bb, valid| {
                if !valid {
                    return;
                }
                for m in 1..=k {
                    for comp in bb.level_components(m) {
                        let ex = component_excess(&decomp, bb, &comp).unwrap();
                        let edges = bb.level_edges(m).filter(|e| comp.contains(&e.u)).count();
                        let plain = edges < comp.len()
                            && comp.iter().all(|&x| !bb.is_split(x))
                            && !bb.bridges().any(|e| comp.contains(&e.u));
                        assert!(ex >= -(m as i64));
                        assert_eq!(ex == -(m as i64), plain, "{sigma} m={m} {comp:?}\n{}", bb.describe());
                        components += 1;
                    }
                }
            });
        }
    }
    assert!(components > 100);
}

#[test]
fn excess_operations() {
    let sigma = Permutation::parse_cycles("(1)(23)(4567)(89ab)", Some(11)).unwrap_or_else(|_| {
        Permutation::from_cycles(11, &[vec![0], vec![1, 2], vec![3, 4, 5, 6], vec![7, 8, 9, 10]]).unwrap()
    });
    let decomp = node_cycles(&sigma);
    let four = decomp.orbit_of(3);
    let two = decomp.orbit_of(1);
    let one = decomp.orbit_of(0);
    let bb = BackboneGraph::empty(decomp.lengths(), 4);
    assert_eq!(excess_operations_check(&decomp, &bb, &[four], ExcessOp::Split { node: four }).unwrap(), 2);
    for label in 1..=2 {
        let op = ExcessOp::Bridge { from: four, to: two, label };
        assert_eq!(excess_operations_check(&decomp, &bb, &[four], op).unwrap(), 2);
    }
    let op = ExcessOp::Bridge { from: four, to: one, label: 1 };
    assert_eq!(excess_operations_check(&decomp, &bb, &[four], op).unwrap(), 3);
    let outside = ExcessOp::Split { node: two };
    assert!(excess_operations_check(&decomp, &bb, &[four], outside).is_err());
}

