use graphcorr::io::{format_binary_graph, format_permutation, format_weighted_graph, parse_binary_graph, parse_permutation, parse_weighted_graph};
use graphcorr::{BinaryGraph, Permutation, WeightedGraph64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    any::<u64>().prop_map(move |seed| Permutation::uniform(n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn graph_strategy(n: usize) -> impl Strategy<Value = BinaryGraph> {
    let m = n * n.saturating_sub(1) / 2;
    proptest::collection::vec(any::<bool>(), m)
        .prop_map(move |bits| BinaryGraph::from_pair_indices(n, bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)))
}

fn sized() -> impl Strategy<Value = (BinaryGraph, Permutation, Permutation)> {
    (1usize..=8).prop_flat_map(|n| (graph_strategy(n), perm_strategy(n), perm_strategy(n)))
}

proptest! {
    #[test]
    fn relabel_composes((b, pi, tau) in sized()) {
        let lhs = b.relabel(&pi.compose(&tau).unwrap()).unwrap();
        let rhs = b.relabel(&pi).unwrap().relabel(&tau).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn relabel_keeps_edge_count_and_inverts((b, pi, _t) in sized()) {
        let r = b.relabel(&pi).unwrap();
        prop_assert_eq!(r.edge_count(), b.edge_count());
        prop_assert_eq!(r.relabel(&pi.inverse()).unwrap(), b.clone());
        for i in 0..b.node_count() {
            for j in i + 1..b.node_count() {
                prop_assert_eq!(r.has_edge(i, j), b.has_edge(pi.apply(i), pi.apply(j)));
            }
        }
    }

    #[test]
    fn intersection_laws(((a, b), c) in (1usize..=8).prop_flat_map(|n| ((graph_strategy(n), graph_strategy(n)), graph_strategy(n)))) {
        prop_assert_eq!(a.intersect(&b).unwrap(), b.intersect(&a).unwrap());
        prop_assert_eq!(
            a.intersect(&b).unwrap().intersect(&c).unwrap(),
            a.intersect(&b.intersect(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.intersect(&a).unwrap(), a.clone());
        prop_assert!(a.intersect(&b).unwrap().is_subgraph_of(&a));
    }

    #[test]
    fn inverse_composes_to_identity(pi in (0usize..=9).prop_flat_map(perm_strategy)) {
        prop_assert!(pi.inverse().compose(&pi).unwrap().is_identity());
        prop_assert!(pi.compose(&pi.inverse()).unwrap().is_identity());
    }

    #[test]
    fn text_formats_round_trip((b, pi, _t) in sized()) {
        prop_assert_eq!(parse_binary_graph(&format_binary_graph(&b)).unwrap(), b.clone());
        prop_assert_eq!(parse_permutation(&format_permutation(&pi)).unwrap(), pi.clone());
        let w: WeightedGraph64 = b.to_weighted();
        prop_assert_eq!(parse_weighted_graph::<f64>(&format_weighted_graph(&w)).unwrap(), w);
    }
}

#[test]
fn relabel_examples() {
    let b = BinaryGraph::from_edges(3, [(0, 1)]).unwrap();
    assert_eq!(b.relabel(&Permutation::identity(3)).unwrap(), b);
    // π = 1→2, 2→3, 3→1; result[i][j] = B[π(i)][π(j)] puts the edge on (1,3).
    let pi = Permutation::from_one_based(&[2, 3, 1]).unwrap();
    assert_eq!(b.relabel(&pi).unwrap().edges(), vec![(0, 2)]);
    assert!(b.relabel(&Permutation::identity(4)).is_err());
}

#[test]
fn intersection_and_induced_examples() {
    let a = BinaryGraph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
    let b = BinaryGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    assert_eq!(a.intersect(&b).unwrap().edges(), vec![(0, 1)]);
    assert!(a.intersect(&BinaryGraph::empty(3)).unwrap().is_empty());
    assert!(a.intersect(&BinaryGraph::empty(4)).is_err());

    assert_eq!(BinaryGraph::complete(4).induced_edge_weight(&[0, 1, 2]), 3.0);
    assert_eq!(a.induced_edge_weight(&[]), 0.0);
    let g = BinaryGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
    assert_eq!(g.induced_edge_weight(&[0, 1, 2]), 1.0);
}

#[test]
fn weighted_graph_checks() {
    let w = WeightedGraph64::from_matrix(&[vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
    assert_eq!(w.get(1, 0), 1.5);
    assert!(WeightedGraph64::from_matrix(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
    assert!(WeightedGraph64::from_matrix(&[vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
    let other = WeightedGraph64::from_matrix(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
    assert_eq!(w.intersect(&other).unwrap().get(0, 1), 3.0);
    assert_eq!(w.induced_edge_weight(&[0, 1]), 1.5);
}

#[test]
fn permutation_parsing() {
    let sigma = Permutation::parse_cycles("(12)(34)(5678)", None).unwrap();
    assert_eq!(sigma.to_one_based_string(), "2 1 4 3 6 7 8 5");
    assert_eq!(parse_permutation("2 1 4 3 6 7 8 5").unwrap(), sigma);
    assert!(Permutation::from_one_based(&[1, 1]).is_err());
    assert!(parse_permutation("1 2 x").is_err());
}
