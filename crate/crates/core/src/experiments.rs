//! Detection-error sweeps, exact small-n total variation, threshold curves
//! and the acceptance runner.
//!
//! Every random draw is keyed by `(master seed, cell, lane, trial)` so a
//! sweep gives the same CSV no matter how rayon schedules the work.

pub mod verify;

use crate::detect::{compute_statistic, decide, default_threshold, likelihood_ratio_exact, Decision, ErKernel, Observation, Tail, TestKind, DEFAULT_RESTARTS};
use crate::error::{domain, Error, Result};
use crate::graph::{pair_count, BinaryGraph};
use crate::oracle::all_graphs;
use crate::sampler::{
    sample_null_er, sample_null_gaussian, sample_planted_er, sample_planted_gaussian, ErParams, GaussianParams,
    ModelParams, SeedSpec,
};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "GRAPHCORR_WORKERS";
/// Largest `n` accepted by the exact ER enumerations.
pub const EXACT_TV_LIMIT: usize = 4;
/// Column order of sweep output.
pub const SWEEP_HEADER: &str = "model,n,rho,p,s,test,trials,type1,type2,err_sum,ci,seed";

const LANE_NULL: u8 = 0;
const LANE_PLANTED: u8 = 1;
const LANE_HELD_NULL: u8 = 2;
const LANE_HELD_PLANTED: u8 = 3;
const LANE_SEARCH: u8 = 4;

/// Sizes the global rayon pool from [`WORKERS_ENV`] when it is set.
///
/// Calling it after the pool exists is harmless.
pub fn configure_workers() -> Result<()> {
    let Ok(text) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = text
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{WORKERS_ENV} must be a positive integer, got {text:?}")))?;
    if workers == 0 {
        return Err(Error::Parse(format!("{WORKERS_ENV} must be positive")));
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModelKind {
    Gaussian,
    Er,
}

/// How each cell's threshold is chosen.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ThresholdMode {
    /// The formula from [`default_threshold`].
    Default,
    /// The error-minimising threshold on held-out trials.
    Oracle,
    /// One row per test for each of the above.
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub n: Vec<usize>,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
    pub s: Vec<f64>,
    pub tests: Vec<TestKind>,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub threshold: ThresholdMode,
    /// Held-out trials per hypothesis for oracle thresholds.
    pub holdout: usize,
    pub restarts: usize,
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad value {t:?} for {key}"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
}

impl SweepConfig {
    pub fn new(model: ModelKind) -> Self {
        Self {
            model,
            n: Vec::new(),
            rho: Vec::new(),
            p: Vec::new(),
            s: Vec::new(),
            tests: Vec::new(),
            trials: 100,
            seed: 0,
            output: None,
            threshold: ThresholdMode::Default,
            holdout: 100,
            restarts: DEFAULT_RESTARTS,
        }
    }

    /// Parses `key = value` lines; lists are comma separated and `#` starts a comment.
    ///
    /// ```text
    /// model = gaussian
    /// n = 6, 8
    /// rho = 0.3, 0.9
    /// tests = qap-exact
    /// trials = 100
    /// seed = 7
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg: Option<Self> = None;
        let mut pending: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim().to_string());
            if key == "model" {
                cfg = Some(Self::new(match value.to_ascii_lowercase().as_str() {
                    "gaussian" => ModelKind::Gaussian,
                    "er" => ModelKind::Er,
                    other => return Err(Error::Parse(format!("unknown model {other:?}"))),
                }));
            } else {
                pending.push((key, value));
            }
        }
        let mut cfg = cfg.ok_or_else(|| Error::Parse("config needs a model line".into()))?;
        for (key, value) in pending {
            match key.as_str() {
                "n" => cfg.n = parse_list(&key, &value)?,
                "rho" => cfg.rho = parse_list(&key, &value)?,
                "p" => cfg.p = parse_list(&key, &value)?,
                "s" => cfg.s = parse_list(&key, &value)?,
                "tests" | "test" => {
                    cfg.tests = value.split(',').map(|t| TestKind::parse(t.trim())).collect::<Result<_>>()?
                }
                "trials" => cfg.trials = parse_one(&key, &value)?,
                "seed" => cfg.seed = parse_one(&key, &value)?,
                "output" | "out" => cfg.output = Some(PathBuf::from(value)),
                "holdout" => cfg.holdout = parse_one(&key, &value)?,
                "restarts" => cfg.restarts = parse_one(&key, &value)?,
                "threshold" => {
                    cfg.threshold = match value.to_ascii_lowercase().as_str() {
                        "default" | "auto" => ThresholdMode::Default,
                        "oracle" => ThresholdMode::Oracle,
                        "both" => ThresholdMode::Both,
                        other => return Err(Error::Parse(format!("unknown threshold mode {other:?}"))),
                    }
                }
                other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(domain("trials must be at least 1"));
        }
        if self.threshold != ThresholdMode::Default && self.holdout == 0 {
            return Err(domain("oracle thresholds need at least one held-out trial"));
        }
        if self.tests.is_empty() {
            return Err(domain("no tests selected"));
        }
        if self.cells().is_empty() {
            return Err(domain("the parameter grid is empty"));
        }
        Ok(())
    }

    /// Grid cells in output order: `n` outermost, then `rho` or `p`, then `s`.
    pub fn cells(&self) -> Vec<ModelParams> {
        let mut out = Vec::new();
        for &n in &self.n {
            match self.model {
                ModelKind::Gaussian => {
                    out.extend(self.rho.iter().map(|&rho| ModelParams::Gaussian(GaussianParams { n, rho })))
                }
                ModelKind::Er => {
                    for &p in &self.p {
                        out.extend(self.s.iter().map(|&s| ModelParams::Er(ErParams { n, p, s })));
                    }
                }
            }
        }
        out
    }
}

/// Empirical type-I and type-II error rates with 95% normal-approximation
/// half-widths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorEstimate {
    pub trials: usize,
    pub type1: f64,
    pub type2: f64,
    pub err_sum: f64,
    pub ci_type1: f64,
    pub ci_type2: f64,
    /// Half-width for the sum, treating the two rates as independent.
    pub ci: f64,
}

impl ErrorEstimate {
    pub fn from_counts(false_alarms: usize, misses: usize, trials: usize) -> Self {
        let n = trials as f64;
        let (t1, t2) = (false_alarms as f64 / n, misses as f64 / n);
        let var1 = t1 * (1.0 - t1) / n;
        let var2 = t2 * (1.0 - t2) / n;
        Self {
            trials,
            type1: t1,
            type2: t2,
            err_sum: t1 + t2,
            ci_type1: 1.96 * var1.sqrt(),
            ci_type2: 1.96 * var2.sqrt(),
            ci: 1.96 * (var1 + var2).sqrt(),
        }
    }

    /// Error counts of the rule `decide(·, threshold, tail)` on the two samples.
    pub fn evaluate(null: &[f64], planted: &[f64], threshold: f64, tail: Tail) -> Self {
        assert_eq!(null.len(), planted.len(), "both hypotheses need the same number of trials");
        let fa = null.iter().filter(|&&x| decide(x, threshold, tail) == Decision::Planted).count();
        let miss = planted.iter().filter(|&&x| decide(x, threshold, tail) == Decision::Null).count();
        Self::from_counts(fa, miss, null.len())
    }
}

/// Threshold minimising the empirical error sum; candidates are midpoints
/// between consecutive distinct statistic values and two outer values.
/// The smallest minimiser wins.
pub fn optimal_threshold(null: &[f64], planted: &[f64], tail: Tail) -> f64 {
    let mut values: Vec<f64> = null.iter().chain(planted).copied().filter(|x| x.is_finite()).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    if values.is_empty() {
        return 0.0;
    }
    let mut candidates = vec![values[0] - 1.0];
    candidates.extend(values.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    candidates.push(values[values.len() - 1] + 1.0);
    let mut best = (usize::MAX, candidates[0]);
    for &tau in &candidates {
        let fa = null.iter().filter(|&&x| decide(x, tau, tail) == Decision::Planted).count();
        let miss = planted.iter().filter(|&&x| decide(x, tau, tail) == Decision::Null).count();
        if fa + miss < best.0 {
            best = (fa + miss, tau);
        }
    }
    best.1
}

/// One output line of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub params: ModelParams,
    /// Test name, suffixed with `+oracle` for oracle thresholds.
    pub test: String,
    pub threshold: f64,
    pub estimate: Result<ErrorEstimate>,
    pub seed: u64,
}

impl SweepRow {
    fn csv(&self) -> String {
        let (n, rho, p, s) = match &self.params {
            ModelParams::Gaussian(g) => (g.n, g.rho.to_string(), String::new(), String::new()),
            ModelParams::Er(e) => (
                e.n,
                self.params.rho().map_or_else(|_| "NaN".into(), |r| r.to_string()),
                e.p.to_string(),
                e.s.to_string(),
            ),
        };
        match &self.estimate {
            Ok(est) => format!(
                "{},{n},{rho},{p},{s},{},{},{},{},{},{},{}",
                self.params.tag(),
                self.test,
                est.trials,
                est.type1,
                est.type2,
                est.err_sum,
                est.ci,
                self.seed
            ),
            Err(_) => format!("{},{n},{rho},{p},{s},{},0,NaN,NaN,NaN,NaN,{}", self.params.tag(), self.test, self.seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv());
            out.push('\n');
        }
        out
    }

    /// Cells that could not be evaluated, with the reason.
    pub fn failures(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter_map(|r| {
                r.estimate.as_ref().err().map(|e| format!("{} n={} {}: {e}", r.params.tag(), r.params.n(), r.test))
            })
            .collect()
    }
}

/// Draws one observation from the null (`planted = false`) or planted model.
pub fn sample_observation(params: &ModelParams, planted: bool, seed: SeedSpec) -> Result<Observation> {
    Ok(match (params, planted) {
        (ModelParams::Gaussian(g), false) => {
            let (a, b) = sample_null_gaussian(g, seed)?;
            Observation::Gaussian { a, b }
        }
        (ModelParams::Gaussian(g), true) => {
            let (a, b, _) = sample_planted_gaussian(g, seed)?;
            Observation::Gaussian { a, b }
        }
        (ModelParams::Er(e), false) => {
            let (a, b) = sample_null_er(e, seed)?;
            Observation::Er { a, b }
        }
        (ModelParams::Er(e), true) => {
            let (a, b, _) = sample_planted_er(e, seed)?;
            Observation::Er { a, b }
        }
    })
}

/// Statistics of every test on `trials` draws from one lane of a cell,
/// indexed `[test][trial]`.
pub fn lane_statistics(
    params: &ModelParams,
    tests: &[TestKind],
    master_seed: u64,
    cell: usize,
    lane: u8,
    trials: usize,
    restarts: usize,
) -> Result<Vec<Vec<f64>>> {
    let planted = lane == LANE_PLANTED || lane == LANE_HELD_PLANTED;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<f64>> {
            let obs = sample_observation(params, planted, SeedSpec::for_trial(master_seed, cell, lane, trial))?;
            let search = SeedSpec::for_trial(master_seed, cell, LANE_SEARCH + lane, trial);
            tests
                .iter()
                .map(|&kind| compute_statistic(kind, &obs, params, restarts, search).map(|(v, _)| v))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok((0..tests.len()).map(|t| per_trial.iter().map(|row| row[t]).collect()).collect())
}

fn sweep_cell(cfg: &SweepConfig, cell: usize, params: &ModelParams) -> Vec<SweepRow> {
    let row = |test: String, threshold: f64, estimate: Result<ErrorEstimate>| SweepRow {
        params: *params,
        test,
        threshold,
        estimate,
        seed: cfg.seed,
    };
    let fail_all = |e: &Error| -> Vec<SweepRow> {
        cfg.tests.iter().map(|k| row(k.name().to_string(), f64::NAN, Err(Error::Contract(e.to_string())))).collect()
    };
    if let Err(e) = params.validate() {
        return fail_all(&e);
    }
    let stats = |lane| lane_statistics(params, &cfg.tests, cfg.seed, cell, lane, cfg.trials, cfg.restarts);
    let (null, planted) = match (stats(LANE_NULL), stats(LANE_PLANTED)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return fail_all(&e),
    };
    let held = if cfg.threshold == ThresholdMode::Default {
        None
    } else {
        let held = |lane| lane_statistics(params, &cfg.tests, cfg.seed, cell, lane, cfg.holdout, cfg.restarts);
        match (held(LANE_HELD_NULL), held(LANE_HELD_PLANTED)) {
            (Ok(a), Ok(b)) => Some((a, b)),
            (Err(e), _) | (_, Err(e)) => return fail_all(&e),
        }
    };
    let mut rows = Vec::new();
    for (t, &kind) in cfg.tests.iter().enumerate() {
        if cfg.threshold != ThresholdMode::Oracle {
            match default_threshold(kind, params) {
                Ok(tau) => rows.push(row(
                    kind.name().to_string(),
                    tau,
                    Ok(ErrorEstimate::evaluate(&null[t], &planted[t], tau, kind.tail())),
                )),
                Err(e) => rows.push(row(kind.name().to_string(), f64::NAN, Err(e))),
            }
        }
        if let Some((hn, hp)) = &held {
            let tau = optimal_threshold(&hn[t], &hp[t], kind.tail());
            rows.push(row(
                format!("{}+oracle", kind.name()),
                tau,
                Ok(ErrorEstimate::evaluate(&null[t], &planted[t], tau, kind.tail())),
            ));
        }
    }
    rows
}

/// Runs every cell of the grid. Rows come out in grid order whatever the
/// completion order; a cell that fails is recorded and the sweep goes on.
/// When `cfg.output` is set the CSV is also written there.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let cells = cfg.cells();
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .enumerate()
        .map(|(cell, params)| sweep_cell(cfg, cell, params))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let result = SweepResult { rows };
    if let Some(path) = &cfg.output {
        crate::io::write_string(path, &result.to_csv())?;
    }
    Ok(result)
}

/// Every graph pair on `n ≤ 4` nodes with its null probability and
/// likelihood ratio.
fn er_pair_table(params: &ErParams) -> Result<Vec<(BinaryGraph, BinaryGraph, f64, f64)>> {
    params.validate()?;
    if params.n > EXACT_TV_LIMIT {
        return Err(Error::Limit { what: "exact ER enumeration", n: params.n, limit: EXACT_TV_LIMIT, hint: "" });
    }
    let graphs = all_graphs(params.n);
    let m = pair_count(params.n) as i32;
    let q = params.density();
    let kernel = ErKernel::new(params.p, params.s);
    let rows: Vec<Vec<(BinaryGraph, BinaryGraph, f64, f64)>> = graphs
        .par_iter()
        .map(|a| {
            graphs
                .iter()
                .map(|b| {
                    let e = (a.edge_count() + b.edge_count()) as i32;
                    let prob = q.powi(e) * (1.0 - q).powi(2 * m - e);
                    let lr: f64 = likelihood_ratio_exact(a, b, &kernel)?;
                    Ok((a.clone(), b.clone(), prob, lr))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// `TV(P, Q) = ½ Σ_{A,B} Q(A,B) |LR(A,B) − 1|` by enumeration, `n ≤ 4`.
pub fn exact_tv_er(params: &ErParams) -> Result<f64> {
    let table = er_pair_table(params)?;
    Ok(0.5 * table.iter().map(|(_, _, q, lr)| q * (lr - 1.0).abs()).sum::<f64>())
}

/// Smallest error sum over all thresholds of a statistic, given per-outcome
/// `(statistic, Q mass, P mass)`.
pub fn min_error_over_thresholds(mut entries: Vec<(f64, f64, f64)>, tail: Tail) -> f64 {
    entries.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total_p: f64 = entries.iter().map(|e| e.2).sum();
    let total_q: f64 = entries.iter().map(|e| e.1).sum();
    // Threshold below everything: the upper tail declares all planted, the
    // lower tail declares all null.
    let mut err = match tail {
        Tail::Upper => total_q,
        Tail::Lower => total_p,
    };
    let mut best = err;
    let mut i = 0;
    while i < entries.len() {
        let mut j = i;
        let (mut dq, mut dp) = (0.0, 0.0);
        while j < entries.len() && entries[j].0 == entries[i].0 {
            dq += entries[j].1;
            dp += entries[j].2;
            j += 1;
        }
        err += match tail {
            Tail::Upper => dp - dq,
            Tail::Lower => dq - dp,
        };
        best = best.min(err);
        i = j;
    }
    best
}

/// Minimal error sum of a test over all thresholds, by enumeration, `n ≤ 4`.
pub fn exact_min_error_er(params: &ErParams, kind: TestKind) -> Result<f64> {
    let table = er_pair_table(params)?;
    let model = ModelParams::Er(*params);
    let entries = table
        .into_iter()
        .map(|(a, b, q, lr)| {
            let stat = match kind {
                TestKind::LikelihoodRatio => lr,
                _ => {
                    let obs = Observation::Er { a, b };
                    compute_statistic(kind, &obs, &model, 0, SeedSpec::new(0, 0))?.0
                }
            };
            Ok((stat, q, q * lr))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(min_error_over_thresholds(entries, kind.tail()))
}

/// Root of `ln(1/p) = 2(1 − p)` in `(0, 1/2)`, the maximiser of
/// `p(ln(1/p) − 1 + p)`.
pub fn p_star() -> f64 {
    let f = |p: f64| (1.0 / p).ln() - 2.0 * (1.0 - p);
    let (mut lo, mut hi) = (1e-3, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn log_grid(n_min: usize, n_max: usize, points: usize) -> Vec<usize> {
    if points <= 1 || n_min == n_max {
        return vec![n_min];
    }
    let (a, b) = ((n_min as f64).ln(), (n_max as f64).ln());
    let mut out: Vec<usize> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}

/// Boundary formulas on a log grid of `n`.
///
/// Gaussian columns are `ρ²` boundaries: upper `4 ln n/(n−1)` and lower
/// `4 ln n/n`. ER columns are `s²` boundaries for each `p`: upper
/// `2 ln n/((n−1)p(ln(1/p) − 1 + p))`, dense lower with `n` in place of
/// `n−1`, and sparse lower `min(1/(np), 0.01)`.
pub fn threshold_curves(model: ModelKind, n_min: usize, n_max: usize, points: usize, p_values: &[f64]) -> Result<String> {
    if n_min < 2 || n_max < n_min {
        return Err(domain(format!("need 2 <= n_min <= n_max, got {n_min}..{n_max}")));
    }
    let mut out = String::new();
    let grid = log_grid(n_min, n_max, points);
    match model {
        ModelKind::Gaussian => {
            out.push_str("model,n,upper,lower\n");
            for n in grid {
                let (nf, ln) = (n as f64, (n as f64).ln());
                let _ = writeln!(out, "gaussian,{n},{},{}", 4.0 * ln / (nf - 1.0), 4.0 * ln / nf);
            }
        }
        ModelKind::Er => {
            if p_values.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
                return Err(domain("ER curves need every p in (0, 1)"));
            }
            out.push_str("model,n,p,upper,dense_lower,sparse_lower\n");
            for n in grid {
                let (nf, ln) = (n as f64, (n as f64).ln());
                for &p in p_values {
                    let shape = p * ((1.0 / p).ln() - 1.0 + p);
                    let _ = writeln!(
                        out,
                        "er,{n},{p},{},{},{}",
                        2.0 * ln / ((nf - 1.0) * shape),
                        2.0 * ln / (nf * shape),
                        (1.0 / (nf * p)).min(0.01)
                    );
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let cfg = SweepConfig::parse("model = er\nn = 5\np = 0.5\ns = 0.2, 0.9 # two cells\ntests = edges\n").unwrap();
        assert_eq!(cfg.cells().len(), 2);
        assert_eq!(cfg.trials, 100);
        assert!(SweepConfig::parse("n = 5").is_err());
        assert!(SweepConfig::parse("model = er\nn = 5\ntests = edges\n").is_err());
        assert!(SweepConfig::parse("model = er\nbogus = 1\n").is_err());
    }

    #[test]
    fn error_estimate_counts() {
        let e = ErrorEstimate::from_counts(10, 30, 100);
        assert!((e.err_sum - 0.4).abs() < 1e-15);
        assert!(e.ci > e.ci_type1 && e.ci > e.ci_type2);
        let e = ErrorEstimate::evaluate(&[0.0, 1.0], &[2.0, 3.0], 1.5, Tail::Upper);
        assert_eq!(e.err_sum, 0.0);
    }

    #[test]
    fn oracle_threshold_separates() {
        let tau = optimal_threshold(&[0.0, 1.0, 2.0], &[5.0, 6.0, 7.0], Tail::Upper);
        assert!(tau > 2.0 && tau < 5.0);
        let tau = optimal_threshold(&[5.0, 6.0], &[0.0, 1.0], Tail::Lower);
        assert!(tau > 1.0 && tau < 5.0);
    }

    #[test]
    fn threshold_sweep_on_point_masses() {
        let entries = vec![(0.0, 0.5, 0.0), (1.0, 0.5, 0.5), (2.0, 0.0, 0.5)];
        assert!((min_error_over_thresholds(entries, Tail::Upper) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tv_vanishes_without_correlation() {
        let tv = exact_tv_er(&ErParams { n: 3, p: 0.5, s: 0.0 }).unwrap();
        assert!(tv.abs() < 1e-15);
        assert!(exact_tv_er(&ErParams { n: 5, p: 0.5, s: 0.5 }).is_err());
    }

    #[test]
    fn p_star_root() {
        let p = p_star();
        assert!(((1.0 / p).ln() - 2.0 * (1.0 - p)).abs() < 1e-12);
        assert!((p - 0.203).abs() < 1e-3);
    }

    #[test]
    fn curves_formulas() {
        let csv = threshold_curves(ModelKind::Gaussian, 100, 100, 1, &[]).unwrap();
        let line = csv.lines().nth(1).unwrap();
        let upper: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((upper - 4.0 * 100f64.ln() / 99.0).abs() < 1e-15);
        let csv = threshold_curves(ModelKind::Er, 10, 1000, 5, &[0.1, 0.999]).unwrap();
        assert_eq!(csv.lines().count(), 1 + 5 * 2);
    }
}
