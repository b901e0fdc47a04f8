//! Likelihood kernels, test statistics and thresholds.

use crate::error::{domain, Error, Result};
use crate::graph::{pair_count, BinaryGraph, EdgeWeights, Permutation, WeightedGraph};
use crate::sampler::{ErParams, ModelParams, SeedSpec};
use crate::scalar::Scalar;
use rayon::prelude::*;
use std::fmt;

/// Largest `n` for which [`qap_exact`] enumerates `S_n` by default.
pub const QAP_EXACT_LIMIT: usize = 10;
/// Largest `n` for which [`likelihood_ratio_exact`] enumerates `S_n` by default.
pub const LR_EXACT_LIMIT: usize = 7;
/// Default number of random restarts for [`qap_local_search`].
pub const DEFAULT_RESTARTS: usize = 20;

/// `(1−ρ²)^{−1/2} exp((−ρ²(a²+b²) + 2ρab) / (2(1−ρ²)))`, the density ratio
/// of a correlated standard normal pair against an independent one.
pub fn kernel_gaussian<T: Scalar>(a: T, b: T, rho: T) -> Result<T> {
    Ok(log_kernel_gaussian(a, b, rho)?.exp())
}

pub fn log_kernel_gaussian<T: Scalar>(a: T, b: T, rho: T) -> Result<T> {
    GaussianKernel::new(rho).map(|k| k.log_kernel(a, b))
}

/// Density ratio of an aligned edge pair in the ER model.
pub fn kernel_er<T: Scalar>(a: bool, b: bool, p: T, s: T) -> T {
    let one = T::one();
    let ps = p * s;
    match (a, b) {
        (true, true) => one / p,
        (true, false) | (false, true) => (one - s) / (one - ps),
        (false, false) => (one - ps - ps + ps * s) / ((one - ps) * (one - ps)),
    }
}

/// Per-edge log density ratio of a model.
pub trait EdgeModel<T: Scalar>: Sync {
    fn log_kernel(&self, a: T, b: T) -> T;
}

#[derive(Clone, Copy, Debug)]
pub struct GaussianKernel<T> {
    rho: T,
    log_norm: T,
    denom: T,
}

impl<T: Scalar> GaussianKernel<T> {
    pub fn new(rho: T) -> Result<Self> {
        if !(rho >= T::zero() && rho < T::one()) {
            return Err(domain(format!("gaussian kernel needs 0 <= rho < 1, got {rho}")));
        }
        let one_minus = T::one() - rho * rho;
        Ok(Self {
            rho,
            log_norm: -T::lit(0.5) * one_minus.ln(),
            denom: T::lit(2.0) * one_minus,
        })
    }
}

impl<T: Scalar> EdgeModel<T> for GaussianKernel<T> {
    #[inline]
    fn log_kernel(&self, a: T, b: T) -> T {
        let r = self.rho;
        self.log_norm + (-r * r * (a * a + b * b) + T::lit(2.0) * r * a * b) / self.denom
    }
}

/// ER kernel; weights are read as bits (`> 1/2` means present).
#[derive(Clone, Copy, Debug)]
pub struct ErKernel<T> {
    log11: T,
    log_mixed: T,
    log00: T,
}

impl<T: Scalar> ErKernel<T> {
    pub fn new(p: T, s: T) -> Self {
        Self {
            log11: kernel_er(true, true, p, s).ln(),
            log_mixed: kernel_er(true, false, p, s).ln(),
            log00: kernel_er(false, false, p, s).ln(),
        }
    }
}

impl<T: Scalar> EdgeModel<T> for ErKernel<T> {
    #[inline]
    fn log_kernel(&self, a: T, b: T) -> T {
        let half = T::lit(0.5);
        match (a > half, b > half) {
            (true, true) => self.log11,
            (false, false) => self.log00,
            _ => self.log_mixed,
        }
    }
}

/// Which side of the threshold counts as evidence for the planted model.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Tail {
    /// Planted iff `statistic >= threshold`.
    Upper,
    /// Planted iff `statistic < threshold`.
    Lower,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Decision {
    Null,
    Planted,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Null => "null",
            Decision::Planted => "planted",
        })
    }
}

/// Result of applying one test to one observation.
#[derive(Clone, Debug, PartialEq)]
pub struct TestOutcome {
    pub statistic: f64,
    pub threshold: f64,
    pub tail: Tail,
    pub decision: Decision,
    pub argmax: Option<Permutation>,
}

impl TestOutcome {
    pub fn new(statistic: f64, threshold: f64, tail: Tail, argmax: Option<Permutation>) -> Self {
        Self { statistic, threshold, tail, decision: decide(statistic, threshold, tail), argmax }
    }
}

#[inline]
pub fn decide(statistic: f64, threshold: f64, tail: Tail) -> Decision {
    let planted = match tail {
        Tail::Upper => statistic >= threshold,
        Tail::Lower => statistic < threshold,
    };
    if planted {
        Decision::Planted
    } else {
        Decision::Null
    }
}

fn check_sizes(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Dimension { expected: a, found: b })
    }
}

/// `Σ_{i<j} A_ij B_{π(i)π(j)}`.
pub fn statistic_given_pi<T: Scalar, G: EdgeWeights<T>, H: EdgeWeights<T>>(
    a: &G,
    b: &H,
    pi: &Permutation,
) -> Result<T> {
    let n = a.node_count();
    check_sizes(n, b.node_count())?;
    check_sizes(n, pi.len())?;
    let mut total = T::zero();
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            total = total + a.weight_at(idx) * b.weight(pi.apply(i), pi.apply(j));
            idx += 1;
        }
    }
    Ok(total)
}

fn dense<T: Scalar, G: EdgeWeights<T>>(g: &G) -> Vec<T> {
    let n = g.node_count();
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = g.weight(i, j);
        }
    }
    out
}

/// Depth-first walk over `S_n` in lexicographic order that accumulates
/// `Σ_{i<j} f(A_ij, B_{π(i)π(j)})` incrementally.
struct PermutationWalk<'a, T> {
    n: usize,
    a: &'a [T],
    b: &'a [T],
    perm: Vec<usize>,
    used: Vec<bool>,
}

impl<'a, T: Scalar> PermutationWalk<'a, T> {
    fn new(n: usize, a: &'a [T], b: &'a [T]) -> Self {
        Self { n, a, b, perm: vec![0; n], used: vec![false; n] }
    }

    /// Fixes `π(0) = first` and visits every completion with its total.
    fn run<F: Fn(T, T) -> T, V: FnMut(&[usize], T)>(&mut self, first: usize, f: &F, visit: &mut V) {
        self.perm[0] = first;
        self.used[first] = true;
        self.descend(1, T::zero(), f, visit);
        self.used[first] = false;
    }

    fn descend<F: Fn(T, T) -> T, V: FnMut(&[usize], T)>(&mut self, depth: usize, acc: T, f: &F, visit: &mut V) {
        let n = self.n;
        if depth == n {
            visit(&self.perm, acc);
            return;
        }
        for v in 0..n {
            if self.used[v] {
                continue;
            }
            let mut add = T::zero();
            for i in 0..depth {
                add = add + f(self.a[i * n + depth], self.b[self.perm[i] * n + v]);
            }
            self.perm[depth] = v;
            self.used[v] = true;
            self.descend(depth + 1, acc + add, f, visit);
            self.used[v] = false;
        }
    }
}

/// Exact `max_π T_π` by enumeration with the default size limit.
pub fn qap_exact<T: Scalar, G: EdgeWeights<T>, H: EdgeWeights<T>>(a: &G, b: &H) -> Result<(T, Permutation)> {
    qap_exact_with_limit(a, b, QAP_EXACT_LIMIT)
}

/// Exact `max_π T_π`; among maximizers the lexicographically smallest `π`
/// is returned.
pub fn qap_exact_with_limit<T: Scalar, G: EdgeWeights<T>, H: EdgeWeights<T>>(
    a: &G,
    b: &H,
    limit: usize,
) -> Result<(T, Permutation)> {
    let n = a.node_count();
    check_sizes(n, b.node_count())?;
    if n > limit {
        return Err(Error::Limit {
            what: "exact QAP",
            n,
            limit,
            hint: "; use qap_local_search instead",
        });
    }
    if n == 0 {
        return Ok((T::zero(), Permutation::identity(0)));
    }
    let (da, db) = (dense(a), dense(b));
    let product = |x: T, y: T| x * y;
    let branches: Vec<(T, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut walk = PermutationWalk::new(n, &da, &db);
            let mut best: Option<(T, Vec<usize>)> = None;
            walk.run(first, &product, &mut |perm, total| {
                if best.as_ref().is_none_or(|(v, _)| total > *v) {
                    best = Some((total, perm.to_vec()));
                }
            });
            best.expect("every branch has at least one permutation")
        })
        .collect();
    let mut best = branches[0].clone();
    for cand in &branches[1..] {
        if cand.0 > best.0 {
            best = cand.clone();
        }
    }
    Ok((best.0, Permutation::new(best.1)?))
}

fn degree_profile_alignment<T: Scalar>(n: usize, da: &[T], db: &[T]) -> Vec<usize> {
    let order = |d: &[T]| {
        let deg: Vec<f64> = (0..n).map(|i| d[i * n..(i + 1) * n].iter().copied().sum::<T>().to_f64_lossy()).collect();
        let second: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| d[i * n + j].to_f64_lossy() * deg[j]).sum())
            .collect();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&x, &y| {
            deg[y]
                .total_cmp(&deg[x])
                .then(second[y].total_cmp(&second[x]))
                .then(x.cmp(&y))
        });
        idx
    };
    let (oa, ob) = (order(da), order(db));
    let mut map = vec![0; n];
    for (x, y) in oa.into_iter().zip(ob) {
        map[x] = y;
    }
    map
}

fn hill_climb<T: Scalar>(n: usize, da: &[T], db: &[T], perm: &mut [usize]) {
    loop {
        let mut improved = false;
        for i in 0..n {
            for j in i + 1..n {
                let (pi, pj) = (perm[i], perm[j]);
                let mut delta = T::zero();
                for y in 0..n {
                    if y == i || y == j {
                        continue;
                    }
                    let py = perm[y];
                    delta = delta + (da[i * n + y] - da[j * n + y]) * (db[pj * n + py] - db[pi * n + py]);
                }
                if delta > T::lit(1e-9) {
                    perm.swap(i, j);
                    improved = true;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// 2-swap hill climbing on `T_π`.
///
/// Starts from the identity, from an alignment of nodes sorted by degree
/// profile, and from `restarts` uniformly random permutations. Each climb
/// applies improving transpositions in scan order until none is left.
pub fn qap_local_search<T: Scalar, G: EdgeWeights<T>, H: EdgeWeights<T>>(
    a: &G,
    b: &H,
    restarts: usize,
    seed: SeedSpec,
) -> Result<(T, Permutation)> {
    let n = a.node_count();
    check_sizes(n, b.node_count())?;
    let (da, db) = (dense(a), dense(b));
    let mut rng = seed.rng();
    let mut starts = vec![(0..n).collect::<Vec<_>>(), degree_profile_alignment(n, &da, &db)];
    for _ in 0..restarts {
        starts.push(Permutation::uniform(n, &mut rng).as_slice().to_vec());
    }
    let mut best: Option<(T, Permutation)> = None;
    for mut perm in starts {
        hill_climb(n, &da, &db, &mut perm);
        let perm = Permutation::new(perm)?;
        let value = statistic_given_pi(a, b, &perm)?;
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, perm));
        }
    }
    Ok(best.unwrap_or((T::zero(), Permutation::identity(0))))
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln LR` where `LR = (1/n!) Σ_π ∏_{i<j} L(A_ij, B_{π(i)π(j)})`, with the
/// default size limit.
pub fn log_likelihood_ratio_exact<T, G, H, M>(a: &G, b: &H, model: &M) -> Result<T>
where
    T: Scalar,
    G: EdgeWeights<T>,
    H: EdgeWeights<T>,
    M: EdgeModel<T>,
{
    log_likelihood_ratio_exact_with_limit(a, b, model, LR_EXACT_LIMIT)
}

pub fn log_likelihood_ratio_exact_with_limit<T, G, H, M>(a: &G, b: &H, model: &M, limit: usize) -> Result<T>
where
    T: Scalar,
    G: EdgeWeights<T>,
    H: EdgeWeights<T>,
    M: EdgeModel<T>,
{
    let n = a.node_count();
    check_sizes(n, b.node_count())?;
    if n > limit {
        return Err(Error::Limit { what: "exact likelihood ratio", n, limit, hint: "" });
    }
    if n < 2 {
        return Ok(T::zero());
    }
    let (da, db) = (dense(a), dense(b));
    let log_l = |x: T, y: T| model.log_kernel(x, y);
    // Every term is collected so the reduction order does not depend on scheduling.
    let mut terms: Vec<T> = Vec::new();
    for first in 0..n {
        let mut walk = PermutationWalk::new(n, &da, &db);
        walk.run(first, &log_l, &mut |_, total| terms.push(total));
    }
    let max = terms.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return Ok(max);
    }
    let sum: T = terms.iter().map(|&t| (t - max).exp()).sum();
    Ok(max + sum.ln() - T::lit(ln_factorial(n)))
}

/// Exact likelihood ratio `P(A,B)/Q(A,B)`.
pub fn likelihood_ratio_exact<T, G, H, M>(a: &G, b: &H, model: &M) -> Result<T>
where
    T: Scalar,
    G: EdgeWeights<T>,
    H: EdgeWeights<T>,
    M: EdgeModel<T>,
{
    Ok(log_likelihood_ratio_exact(a, b, model)?.exp())
}

/// `ρ·C(n,2) − n^{1.1}`.
pub fn threshold_gaussian<T: Scalar>(n: usize, rho: T) -> T {
    threshold_gaussian_with_margin(n, rho, T::count(n).powf(T::lit(1.1)))
}

/// `ρ·C(n,2) − a_n` for a caller-chosen margin `a_n`.
pub fn threshold_gaussian_with_margin<T: Scalar>(n: usize, rho: T, margin: T) -> T {
    rho * T::count(pair_count(n)) - margin
}

/// `μ(1 − μ^{−0.4})` with `μ = C(n,2)·p·s²`; needs `μ > 1`.
pub fn threshold_er<T: Scalar>(n: usize, p: T, s: T) -> Result<T> {
    let mu = T::count(pair_count(n)) * p * s * s;
    if mu <= T::one() {
        return Err(domain(format!("ER threshold needs C(n,2)ps^2 > 1, got {mu}")));
    }
    Ok(mu * (T::one() - mu.powf(T::lit(-0.4))))
}

/// Variances of `e(A) − e(B)` under the null and planted ER models.
pub fn edge_difference_variances(params: &ErParams) -> (f64, f64) {
    let m = pair_count(params.n) as f64;
    let ps = params.density();
    (2.0 * m * ps * (1.0 - ps), 2.0 * m * ps * (1.0 - params.s))
}

/// Point where the densities of `N(0, v_null)` and `N(0, v_planted)` cross.
///
/// When the variances agree to 1e−12 the hypotheses are indistinguishable
/// and the median of `|N(0, v_null)|` is returned. The statistic is integer
/// valued, so every threshold in `(0, 1]` defines the same test; the result
/// is kept at least 1/2 so that a zero difference always counts as planted
/// when `s = 1`.
pub fn edge_count_threshold(params: &ErParams) -> f64 {
    let (v0, v1) = edge_difference_variances(params);
    let crossing = if (v0 - v1).abs() <= 1e-12 {
        0.674_489_750_196_081_7 * v0.sqrt()
    } else if v1 <= 0.0 {
        0.0
    } else {
        (v0 * v1 * (v0 / v1).ln() / (v0 - v1)).sqrt()
    };
    crossing.max(0.5)
}

/// Compares edge counts: planted iff `|e(A) − e(B)| < τ`.
pub fn edge_count_test(a: &BinaryGraph, b: &BinaryGraph, params: &ErParams) -> Result<TestOutcome> {
    check_sizes(a.node_count(), b.node_count())?;
    params.validate()?;
    let stat = (a.edge_count() as f64 - b.edge_count() as f64).abs();
    Ok(TestOutcome::new(stat, edge_count_threshold(params), Tail::Lower, None))
}

/// Test statistics offered by the CLI and the sweeps.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum TestKind {
    QapExact,
    QapLocalSearch,
    LikelihoodRatio,
    EdgeCount,
}

impl TestKind {
    pub const ALL: [TestKind; 4] = [
        TestKind::QapExact,
        TestKind::QapLocalSearch,
        TestKind::LikelihoodRatio,
        TestKind::EdgeCount,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TestKind::QapExact => "qap-exact",
            TestKind::QapLocalSearch => "qap-ls",
            TestKind::LikelihoodRatio => "lr",
            TestKind::EdgeCount => "edges",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == text.trim())
            .ok_or_else(|| Error::Parse(format!("unknown test {text:?}")))
    }

    pub fn tail(&self) -> Tail {
        match self {
            TestKind::EdgeCount => Tail::Lower,
            _ => Tail::Upper,
        }
    }
}

/// A pair of observed graphs.
#[derive(Clone, Debug, PartialEq)]
pub enum Observation {
    Gaussian { a: WeightedGraph<f64>, b: WeightedGraph<f64> },
    Er { a: BinaryGraph, b: BinaryGraph },
}

/// Statistic of `kind` on `obs`, with the maximizing permutation when there is one.
pub fn compute_statistic(
    kind: TestKind,
    obs: &Observation,
    params: &ModelParams,
    restarts: usize,
    seed: SeedSpec,
) -> Result<(f64, Option<Permutation>)> {
    match (kind, obs, params) {
        (TestKind::QapExact, Observation::Gaussian { a, b }, _) => qap_exact(a, b).map(|(v, p)| (v, Some(p))),
        (TestKind::QapExact, Observation::Er { a, b }, _) => {
            qap_exact::<f64, _, _>(a, b).map(|(v, p)| (v, Some(p)))
        }
        (TestKind::QapLocalSearch, Observation::Gaussian { a, b }, _) => {
            qap_local_search(a, b, restarts, seed).map(|(v, p)| (v, Some(p)))
        }
        (TestKind::QapLocalSearch, Observation::Er { a, b }, _) => {
            qap_local_search::<f64, _, _>(a, b, restarts, seed).map(|(v, p)| (v, Some(p)))
        }
        (TestKind::LikelihoodRatio, Observation::Gaussian { a, b }, ModelParams::Gaussian(g)) => {
            likelihood_ratio_exact(a, b, &GaussianKernel::new(g.rho)?).map(|v| (v, None))
        }
        (TestKind::LikelihoodRatio, Observation::Er { a, b }, ModelParams::Er(e)) => {
            likelihood_ratio_exact::<f64, _, _, _>(a, b, &ErKernel::new(e.p, e.s)).map(|v| (v, None))
        }
        (TestKind::EdgeCount, Observation::Er { a, b }, _) => {
            Ok(((a.edge_count() as f64 - b.edge_count() as f64).abs(), None))
        }
        _ => Err(domain(format!("test {} does not apply to this model", kind.name()))),
    }
}

/// The default threshold of each test: the asymptotic formulas for the QAP
/// statistic, 1 for the likelihood ratio, and the density crossing for edges.
pub fn default_threshold(kind: TestKind, params: &ModelParams) -> Result<f64> {
    match (kind, params) {
        (TestKind::QapExact | TestKind::QapLocalSearch, ModelParams::Gaussian(g)) => {
            Ok(threshold_gaussian(g.n, g.rho))
        }
        (TestKind::QapExact | TestKind::QapLocalSearch, ModelParams::Er(e)) => threshold_er(e.n, e.p, e.s),
        (TestKind::LikelihoodRatio, _) => Ok(1.0),
        (TestKind::EdgeCount, ModelParams::Er(e)) => Ok(edge_count_threshold(e)),
        (TestKind::EdgeCount, ModelParams::Gaussian(_)) => {
            Err(domain("the edge-count test needs the ER model"))
        }
    }
}
