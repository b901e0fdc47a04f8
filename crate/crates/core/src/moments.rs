//! Second-moment calculus over edge orbits, generating functions of orbit
//! pseudoforests, Lambert W and cycle-type statistics.

use crate::detect::{likelihood_ratio_exact, ErKernel};
use crate::dsu::ExcessUnionFind;
use crate::error::{domain, Error, Result};
use crate::graph::{pair_count, Permutation};
use crate::oracle::all_graphs;
use crate::orbit::{edge_census, node_cycles, orbits_up_to, CycleType, EdgeOrbit};
use crate::sampler::{rho_er, ErParams, ModelParams, SeedSpec};
use crate::scalar::Scalar;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Largest `n` for which [`second_moment_exact`] enumerates `S_n`.
pub const SECOND_MOMENT_EXACT_LIMIT: usize = 8;
/// Largest `n` for which [`second_moment_bruteforce_er`] sums over graph pairs.
pub const SECOND_MOMENT_BRUTEFORCE_LIMIT: usize = 4;
/// Largest number of candidate orbits the generating-function search accepts.
pub const GF_ORBIT_LIMIT: usize = 24;

/// `E_Q[X_O] = 1/(1−ρ^{2k})` for an edge orbit of length `k` in the Gaussian model.
pub fn orbit_moment_gaussian<T: Scalar>(k: usize, rho: T) -> Result<T> {
    if !(rho >= T::zero() && rho < T::one()) {
        return Err(domain(format!("rho must lie in [0, 1), got {rho}")));
    }
    Ok(T::one() / (T::one() - rho.powi(2 * k as i32)))
}

/// `E_Q[X_O] = 1 + ρ^{2k}` for an edge orbit of length `k` in the ER model.
pub fn orbit_moment_er<T: Scalar>(k: usize, p: T, s: T) -> Result<T> {
    let rho = rho_er(p, s)?;
    Ok(T::one() + rho.powi(2 * k as i32))
}

/// Row-stochastic 2×2 matrix whose trace powers give the ER orbit moments.
///
/// Rows and columns are indexed by edge presence (0 then 1).
pub fn er_transfer_matrix(p: f64, s: f64) -> [[f64; 2]; 2] {
    let ps = p * s;
    [
        [(1.0 - ps * (2.0 - s)) / (1.0 - ps), ps * (1.0 - s) / (1.0 - ps)],
        [1.0 - s, s],
    ]
}

/// Eigenvalues of a 2×2 matrix with real spectrum, larger first.
pub fn eigenvalues_2x2(m: [[f64; 2]; 2]) -> (f64, f64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

/// `E_Q[X_O | O not fully shared] = (1 + ρ^{2k} − s^{2k}) / (1 − (ps)^{2k})`.
pub fn incomplete_orbit_moment_er<T: Scalar>(k: usize, p: T, s: T) -> Result<T> {
    let rho = rho_er(p, s)?;
    let e = 2 * k as i32;
    Ok((T::one() + rho.powi(e) - s.powi(e)) / (T::one() - (p * s).powi(e)))
}

/// Contribution of one cycle type to the second moment.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleTypeContribution {
    pub cycle_type: CycleType,
    /// Number of permutations with this cycle type.
    pub permutations: u64,
    /// `∏_k f(k)^{N_k}` for any permutation of this type.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Half-width of the 95% normal confidence interval.
    pub ci: f64,
    pub samples: usize,
}

/// `E_Q[(P/Q)²]` for one model.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondMomentReport {
    pub model: &'static str,
    pub n: usize,
    pub rho: f64,
    pub exact: Option<f64>,
    pub contributions: Vec<CycleTypeContribution>,
    pub monte_carlo: Option<MonteCarloEstimate>,
}

impl SecondMomentReport {
    /// CSV with one row per cycle type followed by summary rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,n,rho,row,cycle_type,permutations,value\n");
        for c in &self.contributions {
            let _ = writeln!(
                out,
                "{},{},{},cycle_type,\"{}\",{},{}",
                self.model, self.n, self.rho, c.cycle_type, c.permutations, c.value
            );
        }
        if let Some(x) = self.exact {
            let _ = writeln!(out, "{},{},{},exact,,,{}", self.model, self.n, self.rho, x);
        }
        if let Some(mc) = &self.monte_carlo {
            let _ = writeln!(out, "{},{},{},mc_mean,,{},{}", self.model, self.n, self.rho, mc.samples, mc.mean);
            let _ = writeln!(out, "{},{},{},mc_ci,,{},{}", self.model, self.n, self.rho, mc.samples, mc.ci);
        }
        out
    }
}

fn log_orbit_moment(params: &ModelParams, k: usize) -> Result<f64> {
    Ok(match params {
        ModelParams::Gaussian(g) => orbit_moment_gaussian(k, g.rho)?.ln(),
        ModelParams::Er(e) => orbit_moment_er(k, e.p, e.s)?.ln(),
    })
}

/// `ln ∏_k f(k)^{N_k(σ)}`.
pub fn log_orbit_product(params: &ModelParams, sigma: &Permutation) -> Result<f64> {
    let census = edge_census(sigma);
    let mut total = 0.0;
    for (k, count) in census.nonzero() {
        total += count as f64 * log_orbit_moment(params, k)?;
    }
    Ok(total)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `(1/n!) Σ_{σ ∈ S_n} ∏_k f(k)^{N_k(σ)}`, with the contribution of every cycle type.
pub fn second_moment_exact(params: &ModelParams) -> Result<SecondMomentReport> {
    params.validate()?;
    let n = params.n();
    if n > SECOND_MOMENT_EXACT_LIMIT {
        return Err(Error::Limit {
            what: "exact second moment",
            n,
            limit: SECOND_MOMENT_EXACT_LIMIT,
            hint: "; use second_moment_monte_carlo instead",
        });
    }
    let rho = params.rho()?;
    let firsts: Vec<BTreeMap<Vec<usize>, (u64, f64)>> = (0..n.max(1))
        .into_par_iter()
        .map(|first| -> Result<BTreeMap<Vec<usize>, (u64, f64)>> {
            let mut groups = BTreeMap::new();
            if n == 0 {
                return Ok(groups);
            }
            let mut failure = None;
            for_each_with_first(n, first, |sigma| {
                if failure.is_some() {
                    return;
                }
                let ct = node_cycles(sigma).cycle_type().counts();
                match log_orbit_product(params, sigma) {
                    Ok(v) => {
                        let entry = groups.entry(ct).or_insert((0u64, v));
                        entry.0 += 1;
                    }
                    Err(e) => failure = Some(e),
                }
            });
            failure.map_or(Ok(groups), Err)
        })
        .collect::<Result<_>>()?;
    let mut merged: BTreeMap<Vec<usize>, (u64, f64)> = BTreeMap::new();
    for part in firsts {
        for (ct, (count, v)) in part {
            merged.entry(ct).or_insert((0, v)).0 += count;
        }
    }
    let total: u64 = merged.values().map(|(c, _)| c).sum();
    let terms: Vec<f64> = merged.values().map(|&(c, v)| (c as f64).ln() + v).collect();
    let exact = (log_sum_exp(&terms) - (total as f64).ln()).exp();
    let contributions = merged
        .into_iter()
        .map(|(ct, (count, v))| CycleTypeContribution {
            cycle_type: CycleType::from_counts(&ct),
            permutations: count,
            value: v.exp(),
        })
        .collect();
    Ok(SecondMomentReport {
        model: params.tag(),
        n,
        rho,
        exact: Some(exact),
        contributions,
        monte_carlo: None,
    })
}

fn for_each_with_first(n: usize, first: usize, mut visit: impl FnMut(&Permutation)) {
    let mut rest: Vec<usize> = (0..n).filter(|&x| x != first).collect();
    loop {
        let mut map = Vec::with_capacity(n);
        map.push(first);
        map.extend_from_slice(&rest);
        visit(&Permutation::new(map).expect("valid arrangement"));
        if !next_lex(&mut rest) {
            return;
        }
    }
}

fn next_lex(v: &mut [usize]) -> bool {
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

/// Monte-Carlo estimate of the second moment over uniform `σ`.
pub fn second_moment_monte_carlo(params: &ModelParams, samples: usize, seed: SeedSpec) -> Result<SecondMomentReport> {
    params.validate()?;
    if samples == 0 {
        return Err(domain("need at least one sample"));
    }
    let n = params.n();
    let mut rng = seed.rng();
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let sigma = Permutation::uniform(n, &mut rng);
        values.push(log_orbit_product(params, &sigma)?.exp());
    }
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples.max(2) - 1) as f64;
    Ok(SecondMomentReport {
        model: params.tag(),
        n,
        rho: params.rho()?,
        exact: None,
        contributions: Vec::new(),
        monte_carlo: Some(MonteCarloEstimate { mean, ci: 1.96 * (var / samples as f64).sqrt(), samples }),
    })
}

/// `Σ_{A,B} Q(A,B)·LR(A,B)²` over all graph pairs on `n ≤ 4` nodes.
pub fn second_moment_bruteforce_er(params: &ErParams) -> Result<f64> {
    params.validate()?;
    let n = params.n;
    if n > SECOND_MOMENT_BRUTEFORCE_LIMIT {
        return Err(Error::Limit {
            what: "brute-force second moment",
            n,
            limit: SECOND_MOMENT_BRUTEFORCE_LIMIT,
            hint: "",
        });
    }
    let graphs = all_graphs(n);
    let m = pair_count(n);
    let q = params.density();
    let kernel = ErKernel::new(params.p, params.s);
    let total: f64 = graphs
        .par_iter()
        .map(|a| {
            graphs
                .iter()
                .map(|b| {
                    let edges = a.edge_count() + b.edge_count();
                    let weight = q.powi(edges as i32) * (1.0 - q).powi((2 * m - edges) as i32);
                    if weight == 0.0 {
                        return 0.0;
                    }
                    let lr: f64 = likelihood_ratio_exact(a, b, &kernel).expect("n is within the limit");
                    weight * lr * lr
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total)
}

/// Number of orbit subsets with a (pseudo)forest union, by union edge count.
///
/// Subsets of `orbits` are explored depth first; a branch stops as soon as
/// its union breaks the (pseudo)forest condition, since adding orbits can
/// only make things worse. `visit` receives the chosen orbit indices and the
/// edge count of every accepted subset.
pub fn orbit_union_census(
    n: usize,
    orbits: &[EdgeOrbit],
    forest_only: bool,
    mut visit: impl FnMut(&[usize], usize),
) -> Result<Vec<u64>> {
    if orbits.len() > GF_ORBIT_LIMIT {
        return Err(Error::Limit {
            what: "orbit generating function",
            n: orbits.len(),
            limit: GF_ORBIT_LIMIT,
            hint: " (counting candidate orbits)",
        });
    }
    let edge_lists: Vec<Vec<(usize, usize)>> = orbits.iter().map(EdgeOrbit::edges).collect();
    let total_edges: usize = edge_lists.iter().map(Vec::len).sum();
    let mut counts = vec![0u64; total_edges + 1];
    let mut chosen = Vec::new();
    union_dfs(
        &edge_lists,
        0,
        ExcessUnionFind::new(n),
        0,
        forest_only,
        &mut chosen,
        &mut counts,
        &mut visit,
    );
    Ok(counts)
}

#[allow(clippy::too_many_arguments)]
fn union_dfs(
    edges: &[Vec<(usize, usize)>],
    next: usize,
    uf: ExcessUnionFind,
    edge_total: usize,
    forest_only: bool,
    chosen: &mut Vec<usize>,
    counts: &mut [u64],
    visit: &mut impl FnMut(&[usize], usize),
) {
    if next == edges.len() {
        counts[edge_total] += 1;
        visit(chosen, edge_total);
        return;
    }
    let mut with = uf.clone();
    let mut ok = true;
    for &(x, y) in &edges[next] {
        if forest_only && with.same(x, y) {
            ok = false;
            break;
        }
        let root = with.add_edge(x, y);
        if with.excess(root) > 0 {
            ok = false;
            break;
        }
    }
    if ok {
        chosen.push(next);
        union_dfs(edges, next + 1, with, edge_total + edges[next].len(), forest_only, chosen, counts, visit);
        chosen.pop();
    }
    union_dfs(edges, next + 1, uf, edge_total, forest_only, chosen, counts, visit);
}

fn evaluate_census<T: Scalar>(counts: &[u64], s: T) -> T {
    let s2 = s * s;
    let mut total = T::zero();
    let mut power = T::one();
    for &c in counts {
        total = total + T::lit(c as f64) * power;
        power = power * s2;
    }
    total
}

/// `Σ s^{2e(H)}` over orbit pseudoforests `H` assembled from `O_k`.
pub fn gf_orbit_pseudoforests_bruteforce<T: Scalar>(sigma: &Permutation, k: usize, s: T) -> Result<T> {
    let orbits = orbits_up_to(sigma, k);
    let counts = orbit_union_census(sigma.len(), &orbits, false, |_, _| {})?;
    Ok(evaluate_census(&counts, s))
}

/// `Σ s^{2e(H)}` over orbit forests `H` assembled from `O_k`.
pub fn gf_orbit_forests_bruteforce<T: Scalar>(sigma: &Permutation, k: usize, s: T) -> Result<T> {
    let orbits = orbits_up_to(sigma, k);
    let counts = orbit_union_census(sigma.len(), &orbits, true, |_, _| {})?;
    Ok(evaluate_census(&counts, s))
}

/// Product bound on the pseudoforest generating function:
/// `∏_{m≤k} (1 + s^m n_m [m even] + 2 s^{2m} Σ_{ℓ≤m} ℓ n_ℓ + s^{4m} m n_{2m} [2m ≤ k])^{n_m}`.
pub fn gf_bound_jk<T: Scalar>(ct: &CycleType, k: usize, s: T) -> T {
    let mut log_total = T::zero();
    let mut weighted = 0usize;
    for m in 1..=k {
        let nm = ct.count(m);
        weighted += m * nm;
        if nm == 0 {
            continue;
        }
        let mut factor = T::one() + T::lit(2.0) * s.powi(2 * m as i32) * T::count(weighted);
        if m % 2 == 0 {
            factor = factor + s.powi(m as i32) * T::count(nm);
        }
        if 2 * m <= k {
            factor = factor + s.powi(4 * m as i32) * T::count(m * ct.count(2 * m));
        }
        log_total = log_total + T::count(nm) * factor.ln();
    }
    log_total.exp()
}

/// Product bound on the forest generating function:
/// `∏_{m≤k} (1 + s^m [m even] + s^{2m} Σ_{ℓ≤m} ℓ n_ℓ)^{n_m}`.
pub fn gf_bound_forest<T: Scalar>(ct: &CycleType, k: usize, s: T) -> T {
    let mut log_total = T::zero();
    let mut weighted = 0usize;
    for m in 1..=k {
        let nm = ct.count(m);
        weighted += m * nm;
        if nm == 0 {
            continue;
        }
        let mut factor = T::one() + s.powi(2 * m as i32) * T::count(weighted);
        if m % 2 == 0 {
            factor = factor + s.powi(m as i32);
        }
        log_total = log_total + T::count(nm) * factor.ln();
    }
    log_total.exp()
}

/// Principal branch of the Lambert W function on `[−1/e, ∞)`.
pub fn lambert_w<T: Scalar>(x: T) -> Result<T> {
    let one = T::one();
    let branch = -(-one).exp();
    let eps = T::epsilon();
    if x.is_nan() || x < branch - eps * T::lit(4.0) {
        return Err(domain(format!("lambert_w is defined for x >= -1/e, got {x}")));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x == T::infinity() {
        return Ok(x);
    }
    let e = T::E();
    let q = e * x + one;
    if q <= eps * T::lit(16.0) {
        return Ok(-one);
    }
    let mut w = if x < T::lit(-0.32) {
        let p = (T::lit(2.0) * q).sqrt();
        -one + p - p * p / T::lit(3.0) + T::lit(11.0 / 72.0) * p * p * p
    } else if x < e {
        let l = (one + x).ln();
        l * (one - l / (T::lit(2.0) + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + one;
        if wp1 == T::zero() {
            break;
        }
        let denom = ew * wp1 - (w + T::lit(2.0)) * f / (T::lit(2.0) * wp1);
        let step = f / denom;
        w = w - step;
        if step.abs() <= eps * T::lit(2.0) * (one + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// Argument handed to W by [`zeta_threshold`]:
/// `2 ln(2en/k) / (e(k−1)ps²) − 1/e`.
pub fn zeta_argument<T: Scalar>(k: usize, n: usize, p: T, s: T) -> Result<T> {
    if k < 2 || k > n {
        return Err(domain(format!("zeta needs 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let ps2 = p * s * s;
    if ps2 <= T::zero() {
        return Err(domain("zeta needs ps^2 > 0"));
    }
    let e = T::E();
    let two = T::lit(2.0);
    Ok(two * (two * e * T::count(n) / T::count(k)).ln() / (e * T::count(k - 1) * ps2) - one_over_e::<T>())
}

fn one_over_e<T: Scalar>() -> T {
    (-T::one()).exp()
}

/// `ζ(k) = C(k,2)ps²·exp(1 + W(2 ln(2en/k)/(e(k−1)ps²) − 1/e))`.
pub fn zeta_threshold<T: Scalar>(k: usize, n: usize, p: T, s: T) -> Result<T> {
    let arg = zeta_argument(k, n, p, s)?;
    let w = lambert_w(arg)?;
    Ok(T::count(pair_count(k)) * p * s * s * (T::one() + w).exp())
}

/// `1/∏_ℓ ℓ^{a_ℓ} a_ℓ!` for `a = [a_1, a_2, …]`.
pub fn poisson_cycle_moment(a: &[usize]) -> f64 {
    let mut log_denom = 0.0;
    for (idx, &al) in a.iter().enumerate() {
        let l = (idx + 1) as f64;
        log_denom += al as f64 * l.ln() + ln_factorial(al);
    }
    (-log_denom).exp()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `F(x) = √(2πm)·2^{m−1}/(m−1)! + 1/m! + 3(x/e)^{−x}` with `m = ⌈x⌉`.
pub fn poisson_tail_bound(x: f64) -> f64 {
    let m = x.ceil().max(1.0) as usize;
    let first = (0.5 * (2.0 * std::f64::consts::PI * m as f64).ln() + (m - 1) as f64 * 2f64.ln()
        - ln_factorial(m - 1))
    .exp();
    let second = (-ln_factorial(m)).exp();
    let third = 3.0 * (-x * (x / std::f64::consts::E).ln()).exp();
    first + second + third
}

/// Empirical cycle-type distance from the Poisson limit.
#[derive(Clone, Debug, PartialEq)]
pub struct TvReport {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    /// Total variation between the empirical law of `(n_1, …, n_k)` and
    /// `⊗_ℓ Poi(1/ℓ)`.
    pub tv: f64,
    /// `F(n/k)`, reported for context.
    pub bound: f64,
}

fn poisson_product_pmf(counts: &[usize]) -> f64 {
    let mut log_p = 0.0;
    for (idx, &c) in counts.iter().enumerate() {
        let lambda = 1.0 / (idx + 1) as f64;
        log_p += -lambda + c as f64 * lambda.ln() - ln_factorial(c);
    }
    log_p.exp()
}

/// Samples `trials` uniform permutations of `n` nodes and measures the total
/// variation between the law of `(n_1, …, n_k)` and independent `Poi(1/ℓ)`.
///
/// The empirical law has finite support, so the distance is exact: tuples
/// never observed contribute their full Poisson mass.
pub fn cycle_type_tv_check(n: usize, k: usize, trials: usize, seed: SeedSpec) -> Result<TvReport> {
    if trials == 0 {
        return Err(domain("cycle_type_tv_check needs at least one trial"));
    }
    if k == 0 || k >= n {
        return Err(domain(format!("need 1 <= k < n, got k = {k}, n = {n}")));
    }
    let mut rng = seed.rng();
    let mut hist: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for _ in 0..trials {
        let sigma = Permutation::uniform(n, &mut rng);
        let ct = node_cycles(&sigma).cycle_type();
        let key: Vec<usize> = (1..=k).map(|l| ct.count(l)).collect();
        *hist.entry(key).or_insert(0) += 1;
    }
    let mut observed_mass = 0.0;
    let mut diff = 0.0;
    for (key, &count) in &hist {
        let pmf = poisson_product_pmf(key);
        observed_mass += pmf;
        diff += (count as f64 / trials as f64 - pmf).abs();
    }
    let tv = 0.5 * (diff + (1.0 - observed_mass).max(0.0));
    Ok(TvReport { n, k, trials, tv, bound: poisson_tail_bound(n as f64 / k as f64) })
}

/// Exact total variation between the number of fixed points of a uniform
/// permutation of `n` nodes and `Poi(1)`.
pub fn fixed_point_tv_exact(n: usize) -> f64 {
    // Permutations with exactly j fixed points: C(n, j)·D(n − j), D = derangements.
    let mut derange = vec![1.0f64; n + 1];
    if n >= 1 {
        derange[1] = 0.0;
    }
    for m in 2..=n {
        derange[m] = (m - 1) as f64 * (derange[m - 1] + derange[m - 2]);
    }
    let fact_n = ln_factorial(n);
    let mut diff = 0.0;
    let mut mass = 0.0;
    for j in 0..=n {
        let ln_choose = fact_n - ln_factorial(j) - ln_factorial(n - j);
        let exact = (ln_choose + derange[n - j].ln() - fact_n).exp();
        let exact = if derange[n - j] == 0.0 { 0.0 } else { exact };
        let pois = poisson_product_pmf(&[j]);
        mass += pois;
        diff += (exact - pois).abs();
    }
    0.5 * (diff + (1.0 - mass).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_moment_examples() {
        assert_eq!(orbit_moment_gaussian(3, 0.0).unwrap(), 1.0);
        assert!((orbit_moment_gaussian::<f64>(1, 0.5).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(orbit_moment_gaussian(1, 1.0f64).is_err());
        assert_eq!(orbit_moment_er(2, 0.4, 0.0).unwrap(), 1.0);
        assert!((orbit_moment_er::<f64>(1, 0.5, 0.5).unwrap() - 10.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn transfer_matrix_spectrum() {
        for &(p, s) in &[(0.5, 0.5), (0.1, 0.9), (0.8, 0.2)] {
            let m = er_transfer_matrix(p, s);
            assert!((m[0][0] + m[0][1] - 1.0).abs() < 1e-14);
            let (hi, lo) = eigenvalues_2x2(m);
            assert!((hi - 1.0).abs() < 1e-12);
            assert!((lo - rho_er(p, s).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_moment_example() {
        let v: f64 = incomplete_orbit_moment_er::<f64>(1, 0.5, 0.5).unwrap();
        let want = (1.0 + 1.0 / 9.0 - 0.25) / (1.0 - 1.0 / 16.0);
        assert!((v - want).abs() < 1e-15);
        assert!(v <= 1.0);
        assert_eq!(incomplete_orbit_moment_er(2, 0.3, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn second_moment_three_nodes_closed_form() {
        let params = ModelParams::Er(ErParams::new(3, 0.4, 0.7).unwrap());
        let rho: f64 = rho_er(0.4, 0.7).unwrap();
        let r2 = rho * rho;
        let want = ((1.0 + r2).powi(3) + 3.0 * (1.0 + r2) * (1.0 + r2 * r2) + 2.0 * (1.0 + r2.powi(3))) / 6.0;
        let got = second_moment_exact(&params).unwrap().exact.unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn lambert_w_fixed_points() {
        assert_eq!(lambert_w(0.0f64).unwrap(), 0.0);
        assert!((lambert_w(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!((lambert_w(-(-1.0f64).exp()).unwrap() + 1.0).abs() < 1e-7);
        assert!(lambert_w(-0.5f64).is_err());
        assert!((lambert_w(std::f32::consts::E).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn poisson_moment_examples() {
        assert_eq!(poisson_cycle_moment(&[1]), 1.0);
        assert!((poisson_cycle_moment(&[2]) - 0.5).abs() < 1e-15);
        assert!((poisson_cycle_moment(&[0, 1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tv_check_requires_trials() {
        assert!(cycle_type_tv_check(10, 2, 0, SeedSpec::new(1, 0)).is_err());
    }

    #[test]
    fn bounds_at_zero() {
        let ct = CycleType::from_counts(&[0, 2, 0, 1]);
        assert_eq!(gf_bound_jk(&ct, 4, 0.0), 1.0);
        assert_eq!(gf_bound_forest(&ct, 4, 0.0), 1.0);
        assert_eq!(gf_bound_jk(&CycleType::from_counts(&[0, 0, 3]), 2, 0.5), 1.0);
    }
}
