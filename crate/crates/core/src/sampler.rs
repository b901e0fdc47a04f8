//! Draws from the null and planted models.
//!
//! Every sampler is a pure function of its parameters and a [`SeedSpec`].
//! Bernoulli edge sets are drawn by geometric skipping over the pair index,
//! so the cost scales with the number of edges rather than with `C(n,2)`.

use crate::error::{domain, Result};
use crate::graph::{pair_count, BinaryGraph, Permutation, WeightedGraph};
use crate::scalar::Scalar;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gaussian model: unit-variance weights with correlation `rho` under the planted model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianParams {
    pub n: usize,
    pub rho: f64,
}

impl GaussianParams {
    pub fn new(n: usize, rho: f64) -> Result<Self> {
        let params = Self { n, rho };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if (0.0..1.0).contains(&self.rho) {
            Ok(())
        } else {
            Err(domain(format!("rho must lie in [0, 1), got {}", self.rho)))
        }
    }
}

/// Erdős–Rényi model: parent density `p`, subsampling probability `s`.
///
/// The boundary values `p = 0` and `s = 0` are accepted; they describe
/// degenerate models with empty graphs or independent marginals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErParams {
    pub n: usize,
    pub p: f64,
    pub s: f64,
}

impl ErParams {
    pub fn new(n: usize, p: f64, s: f64) -> Result<Self> {
        let params = Self { n, p, s };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.p) {
            return Err(domain(format!("p must lie in [0, 1), got {}", self.p)));
        }
        if !(0.0..=1.0).contains(&self.s) {
            return Err(domain(format!("s must lie in [0, 1], got {}", self.s)));
        }
        Ok(())
    }

    /// Marginal edge density `p·s`.
    pub fn density(&self) -> f64 {
        self.p * self.s
    }

    /// Expected number of shared edges `C(n,2)·p·s²`.
    pub fn shared_mean(&self) -> f64 {
        pair_count(self.n) as f64 * self.p * self.s * self.s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelParams {
    Gaussian(GaussianParams),
    Er(ErParams),
}

impl ModelParams {
    pub fn n(&self) -> usize {
        match self {
            ModelParams::Gaussian(g) => g.n,
            ModelParams::Er(e) => e.n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Gaussian(g) => g.validate(),
            ModelParams::Er(e) => e.validate(),
        }
    }

    /// Correlation coefficient of an edge pair under the planted model.
    pub fn rho(&self) -> Result<f64> {
        match self {
            ModelParams::Gaussian(g) => Ok(g.rho),
            ModelParams::Er(e) => rho_er(e.p, e.s),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ModelParams::Gaussian(_) => "gaussian",
            ModelParams::Er(_) => "er",
        }
    }
}

/// Identifies an independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// Stream for one trial of one sweep cell; `lane` separates the roles a
    /// trial plays (null draw, planted draw, threshold calibration, ...).
    pub fn for_trial(master_seed: u64, cell: usize, lane: u8, trial: usize) -> Self {
        debug_assert!(trial < 1 << 32 && cell < 1 << 24);
        Self::new(master_seed, (cell as u64) << 40 | (lane as u64) << 32 | trial as u64)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// `ρ = s(1−p)/(1−ps)`, the edge correlation of the planted ER model.
pub fn rho_er<T: Scalar>(p: T, s: T) -> Result<T> {
    let one = T::one();
    let zero = T::zero();
    if !(p >= zero && p < one && s >= zero && s <= one) {
        return Err(domain(format!("rho_er needs p in [0, 1) and s in [0, 1], got p = {p}, s = {s}")));
    }
    Ok(s * (one - p) / (one - p * s))
}

/// Calls `hit` with each index in `0..m` that succeeds in an independent
/// Bernoulli(`q`) trial, in increasing order.
fn bernoulli_indices<R: Rng>(rng: &mut R, m: usize, q: f64, mut hit: impl FnMut(usize)) {
    if q <= 0.0 || m == 0 {
        return;
    }
    if q >= 1.0 {
        (0..m).for_each(hit);
        return;
    }
    let log_miss = (-q).ln_1p();
    let mut i = 0usize;
    loop {
        let u: f64 = rng.gen();
        let skip = ((1.0 - u).ln() / log_miss).floor();
        if skip >= (m - i) as f64 {
            return;
        }
        i += skip as usize;
        hit(i);
        i += 1;
        if i >= m {
            return;
        }
    }
}

fn gnp<R: Rng>(rng: &mut R, n: usize, q: f64) -> BinaryGraph {
    let mut g = BinaryGraph::empty(n);
    bernoulli_indices(rng, pair_count(n), q, |idx| g.insert_index(idx));
    g
}

fn normals<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn sample_null_gaussian(
    params: &GaussianParams,
    seed: SeedSpec,
) -> Result<(WeightedGraph<f64>, WeightedGraph<f64>)> {
    params.validate()?;
    let mut rng = seed.rng();
    let m = pair_count(params.n);
    let a = WeightedGraph::from_pair_weights(params.n, normals(&mut rng, m))?;
    let b = WeightedGraph::from_pair_weights(params.n, normals(&mut rng, m))?;
    Ok((a, b))
}

/// Returns `(A, B, π)` with `(A_ij, B_{π(i)π(j)})` standard bivariate normal
/// with correlation `ρ`.
pub fn sample_planted_gaussian(
    params: &GaussianParams,
    seed: SeedSpec,
) -> Result<(WeightedGraph<f64>, WeightedGraph<f64>, Permutation)> {
    params.validate()?;
    let mut rng = seed.rng();
    let n = params.n;
    let m = pair_count(n);
    let pi = Permutation::uniform(n, &mut rng);
    let a = normals(&mut rng, m);
    let noise = (1.0 - params.rho * params.rho).sqrt();
    let aligned: Vec<f64> = a
        .iter()
        .map(|&x| params.rho * x + noise * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let a = WeightedGraph::from_pair_weights(n, a)?;
    let b = WeightedGraph::from_pair_weights(n, aligned)?.relabel(&pi.inverse())?;
    Ok((a, b, pi))
}

pub fn sample_null_er(params: &ErParams, seed: SeedSpec) -> Result<(BinaryGraph, BinaryGraph)> {
    params.validate()?;
    let mut rng = seed.rng();
    let q = params.density();
    let a = gnp(&mut rng, params.n, q);
    let b = gnp(&mut rng, params.n, q);
    Ok((a, b))
}

/// Planted ER draw using the conditional form: `A ~ G(n, ps)`, then each
/// aligned pair of `B` is Bern(`s`) on edges of `A` and
/// Bern(`ps(1−s)/(1−ps)`) elsewhere.
pub fn sample_planted_er(
    params: &ErParams,
    seed: SeedSpec,
) -> Result<(BinaryGraph, BinaryGraph, Permutation)> {
    params.validate()?;
    let mut rng = seed.rng();
    let n = params.n;
    let pi = Permutation::uniform(n, &mut rng);
    let ps = params.density();
    let a = gnp(&mut rng, n, ps);
    let mut aligned = BinaryGraph::empty(n);
    for idx in a.pair_indices() {
        if rng.gen::<f64>() < params.s {
            aligned.insert_index(idx);
        }
    }
    let q_off = if ps < 1.0 { ps * (1.0 - params.s) / (1.0 - ps) } else { 0.0 };
    bernoulli_indices(&mut rng, pair_count(n), q_off, |idx| {
        if !a.has_index(idx) {
            aligned.insert_index(idx);
        }
    });
    let b = aligned.relabel(&pi.inverse())?;
    Ok((a, b, pi))
}

/// Planted ER draw by subsampling a common parent `G(n, p)` twice.
pub fn sample_planted_er_parent(
    params: &ErParams,
    seed: SeedSpec,
) -> Result<(BinaryGraph, BinaryGraph, Permutation)> {
    params.validate()?;
    let mut rng = seed.rng();
    let n = params.n;
    let pi = Permutation::uniform(n, &mut rng);
    let parent = gnp(&mut rng, n, params.p);
    let mut a = BinaryGraph::empty(n);
    let mut aligned = BinaryGraph::empty(n);
    for idx in parent.pair_indices() {
        if rng.gen::<f64>() < params.s {
            a.insert_index(idx);
        }
        if rng.gen::<f64>() < params.s {
            aligned.insert_index(idx);
        }
    }
    let b = aligned.relabel(&pi.inverse())?;
    Ok((a, b, pi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_er_examples() {
        assert_eq!(rho_er(0.3, 1.0).unwrap(), 1.0);
        assert!((rho_er::<f64>(0.5, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(rho_er(0.5, 0.0).unwrap(), 0.0);
        assert!(rho_er(1.0, 0.5).is_err());
        assert!((rho_er(0.5f32, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn params_validate() {
        assert!(GaussianParams::new(5, 1.0).is_err());
        assert!(ErParams::new(5, 1.0, 0.5).is_err());
        assert!(ErParams::new(5, 0.5, 1.5).is_err());
        assert!(ErParams::new(5, 0.0, 0.5).is_ok());
    }

    #[test]
    fn bernoulli_indices_density() {
        let mut rng = SeedSpec::new(7, 0).rng();
        let mut hits = 0usize;
        let mut last = None;
        bernoulli_indices(&mut rng, 200_000, 0.1, |i| {
            assert!(last.is_none_or(|l| l < i));
            last = Some(i);
            hits += 1;
        });
        let sd = (200_000.0f64 * 0.1 * 0.9).sqrt();
        assert!((hits as f64 - 20_000.0).abs() < 5.0 * sd);
    }

    #[test]
    fn same_seed_same_sample() {
        let params = ErParams::new(40, 0.3, 0.7).unwrap();
        let s = SeedSpec::new(11, 3);
        assert_eq!(sample_planted_er(&params, s).unwrap(), sample_planted_er(&params, s).unwrap());
        let other = sample_planted_er(&params, SeedSpec::new(11, 4)).unwrap();
        assert_ne!(sample_planted_er(&params, s).unwrap().0, other.0);
    }

    #[test]
    fn zero_density_gives_empty_graphs() {
        let params = ErParams::new(10, 0.0, 0.5).unwrap();
        let (a, b) = sample_null_er(&params, SeedSpec::new(1, 1)).unwrap();
        assert!(a.is_empty() && b.is_empty());
    }

    #[test]
    fn full_subsampling_gives_isomorphic_pair() {
        let params = ErParams::new(30, 0.4, 1.0).unwrap();
        let (a, b, pi) = sample_planted_er(&params, SeedSpec::new(5, 0)).unwrap();
        let bp = b.relabel(&pi).unwrap();
        assert_eq!(a.intersect(&bp).unwrap(), a);
        assert_eq!(a, bp);
    }
}
