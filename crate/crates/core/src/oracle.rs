//! Brute-force references for the closed forms elsewhere in the crate.
//!
//! Everything here sums over an explicit finite set, so these functions are
//! slow and refuse large inputs. They share no code with the functions they
//! check beyond the graph and permutation value types.

use crate::dsu::ExcessUnionFind;
use crate::error::{Error, Result};
use crate::graph::{pair_count, BinaryGraph, Permutation};
use crate::orbit::{node_cycles, orbits_up_to};
use crate::sampler::SeedSpec;
use rand_distr::{Distribution, StandardNormal};

/// Largest `n` for which [`all_graphs`] is used by the oracles.
pub const ALL_GRAPHS_LIMIT: usize = 5;

/// Every binary graph on `n` nodes, ordered by the bitmask of pair indices.
pub fn all_graphs(n: usize) -> Vec<BinaryGraph> {
    let m = pair_count(n);
    assert!(m < 32, "all_graphs: {n} nodes is too many to list");
    (0u32..1 << m)
        .map(|mask| BinaryGraph::from_pair_indices(n, (0..m).filter(|&i| mask >> i & 1 == 1)))
        .collect()
}

fn er_likelihood(a: bool, b: bool, p: f64, s: f64) -> f64 {
    // Joint pmf under the planted model over the product of marginals.
    let q = p * s;
    let joint = match (a, b) {
        (true, true) => p * s * s,
        (true, false) | (false, true) => q - p * s * s,
        (false, false) => 1.0 - 2.0 * q + p * s * s,
    };
    let marg = |x: bool| if x { q } else { 1.0 - q };
    joint / (marg(a) * marg(b))
}

fn orbit_configurations(k: usize, p: f64, s: f64, skip_all_ones: bool) -> Result<(f64, f64)> {
    if k == 0 || k > 6 {
        return Err(Error::Limit { what: "orbit moment oracle", n: k, limit: 6, hint: "" });
    }
    let q = p * s;
    let mut mass = 0.0;
    let mut total = 0.0;
    for bits in 0u32..1 << (2 * k) {
        let a = |l: usize| bits >> l & 1 == 1;
        let b = |l: usize| bits >> (k + l) & 1 == 1;
        if skip_all_ones && bits == (1 << (2 * k)) - 1 {
            continue;
        }
        let ones = bits.count_ones() as i32;
        let prob = q.powi(ones) * (1.0 - q).powi(2 * k as i32 - ones);
        let mut x = 1.0;
        for l in 0..k {
            x *= er_likelihood(a(l), b(l), p, s) * er_likelihood(a(l), b((l + 1) % k), p, s);
        }
        mass += prob;
        total += prob * x;
    }
    Ok((total, mass))
}

/// `E_Q[∏_ℓ L(a_ℓ, b_ℓ) L(a_ℓ, b_{ℓ+1})]` for an orbit of length `k ≤ 6`,
/// summed over all `2^{2k}` edge configurations.
pub fn orbit_moment_er_oracle(k: usize, p: f64, s: f64) -> Result<f64> {
    Ok(orbit_configurations(k, p, s, false)?.0)
}

/// Same as [`orbit_moment_er_oracle`] conditioned on the orbit not being
/// present in both graphs.
pub fn incomplete_orbit_moment_er_oracle(k: usize, p: f64, s: f64) -> Result<f64> {
    let (total, mass) = orbit_configurations(k, p, s, true)?;
    Ok(total / mass)
}

/// Monte-Carlo mean and standard error of the Gaussian orbit variable for an
/// orbit of length `k`.
pub fn orbit_moment_gaussian_monte_carlo(k: usize, rho: f64, samples: usize, seed: SeedSpec) -> (f64, f64) {
    let mut rng = seed.rng();
    let r2 = rho * rho;
    let log_kernel = |a: f64, b: f64| {
        -0.5 * (1.0 - r2).ln() - (r2 * (a * a + b * b) - 2.0 * rho * a * b) / (2.0 * (1.0 - r2))
    };
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut a = vec![0.0; k];
    let mut b = vec![0.0; k];
    for _ in 0..samples {
        for l in 0..k {
            a[l] = StandardNormal.sample(&mut rng);
            b[l] = StandardNormal.sample(&mut rng);
        }
        let log_x: f64 = (0..k).map(|l| log_kernel(a[l], b[l]) + log_kernel(a[l], b[(l + 1) % k])).sum();
        let x = log_x.exp();
        sum += x;
        sum_sq += x * x;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    (mean, (var / samples as f64).sqrt())
}

/// Rooted forests on `n` labeled nodes with `a` edges, by listing edge
/// subsets of the complete graph; each forest counts `∏ |component|` times.
pub fn count_rooted_forests_bruteforce(n: usize, a: usize) -> u128 {
    let pairs: Vec<(usize, usize)> = crate::graph::pairs(n).collect();
    let mut total = 0u128;
    subsets(&pairs, a, &mut |chosen| {
        let mut uf = ExcessUnionFind::new(n);
        for &(x, y) in chosen {
            if uf.same(x, y) {
                return;
            }
            uf.add_edge(x, y);
        }
        total += root_weight(&mut uf, n);
    });
    total
}

fn root_weight(uf: &mut ExcessUnionFind, n: usize) -> u128 {
    let mut w = 1u128;
    for x in 0..n {
        if uf.find(x) == x {
            w *= uf.vertices(x) as u128;
        }
    }
    w
}

fn subsets<E: Copy>(items: &[E], size: usize, visit: &mut dyn FnMut(&[E])) {
    fn go<E: Copy>(items: &[E], start: usize, size: usize, acc: &mut Vec<E>, visit: &mut dyn FnMut(&[E])) {
        if acc.len() == size {
            visit(acc);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - acc.len() {
                break;
            }
            acc.push(items[i]);
            go(items, i + 1, size, acc, visit);
            acc.pop();
        }
    }
    go(items, 0, size, &mut Vec::with_capacity(size), visit);
}

/// Rooted pseudoforests on `n` labeled nodes with `a` edges, where loops
/// and repeated edges are allowed and each counts as a cycle. Edge multisets
/// are listed directly and each valid one counts `∏ |component|` times.
pub fn rooted_pseudoforest_bruteforce(n: usize, a: usize) -> u128 {
    let mut slots: Vec<(usize, usize)> = (0..n).map(|x| (x, x)).collect();
    slots.extend(crate::graph::pairs(n));
    let mut total = 0u128;
    fn go(
        slots: &[(usize, usize)],
        start: usize,
        left: usize,
        uf: &ExcessUnionFind,
        n: usize,
        total: &mut u128,
    ) {
        if left == 0 {
            let mut uf = uf.clone();
            *total += root_weight(&mut uf, n);
            return;
        }
        for i in start..slots.len() {
            let mut next = uf.clone();
            let r = next.add_edge(slots[i].0, slots[i].1);
            if next.excess(r) <= 0 {
                go(slots, i, left - 1, &next, n, total);
            }
        }
    }
    go(&slots, 0, a, &ExcessUnionFind::new(n), n, &mut total);
    total
}

/// `Σ s^{2e(H)}` over all unions of orbits from `O_k` that are
/// (pseudo)forests, testing every one of the `2^{|O_k|}` subsets.
pub fn gf_unpruned(sigma: &Permutation, k: usize, s: f64, forest_only: bool) -> Result<f64> {
    let orbits = orbits_up_to(sigma, k);
    if orbits.len() > 20 {
        return Err(Error::Limit { what: "unpruned generating function", n: orbits.len(), limit: 20, hint: "" });
    }
    let n = sigma.len();
    let edges: Vec<Vec<(usize, usize)>> = orbits.iter().map(|o| o.edges()).collect();
    let mut total = 0.0;
    for mask in 0u32..1 << orbits.len() {
        let mut uf = ExcessUnionFind::new(n);
        let mut count = 0usize;
        for (i, list) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &(x, y) in list {
                    uf.add_edge(x, y);
                    count += 1;
                }
            }
        }
        let ok = (0..n).all(|x| {
            let r = uf.find(x);
            let limit = if forest_only { -1 } else { 0 };
            uf.excess(r) <= limit
        });
        if ok {
            total += s.powi(2 * count as i32);
        }
    }
    Ok(total)
}

/// `(1/n!) Σ_{σ ∈ S_n} ∏_ℓ C(n_ℓ(σ), a_ℓ)`.
pub fn poisson_cycle_moment_exact(n: usize, a: &[usize]) -> f64 {
    let mut total = 0.0;
    let mut count = 0u64;
    Permutation::for_each_of_size(n, |sigma| {
        let ct = node_cycles(sigma).cycle_type();
        let mut term = 1.0;
        for (idx, &al) in a.iter().enumerate() {
            term *= binomial(ct.count(idx + 1), al);
        }
        total += term;
        count += 1;
    });
    total / count as f64
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_listing() {
        assert_eq!(all_graphs(3).len(), 8);
        assert_eq!(all_graphs(0).len(), 1);
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_rooted_forests_bruteforce(3, 1), 6);
        assert_eq!(count_rooted_forests_bruteforce(3, 2), 9);
        assert_eq!(rooted_pseudoforest_bruteforce(2, 2), 7);
        assert_eq!(rooted_pseudoforest_bruteforce(1, 1), 1);
    }

    #[test]
    fn single_edge_orbit() {
        let v = orbit_moment_er_oracle(1, 0.3, 0.6).unwrap();
        let rho = 0.6 * (1.0 - 0.3) / (1.0 - 0.18);
        assert!((v - (1.0 + rho * rho)).abs() < 1e-12);
    }
}
