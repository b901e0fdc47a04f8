//! Hypothesis testing for correlation between two unlabeled random graphs.
//!
//! The crate covers the full pipeline at desk scale: samplers for the null
//! and planted models (Gaussian and Erdős–Rényi), detection statistics and
//! their thresholds, the edge-orbit algebra induced by a node permutation,
//! exact and Monte-Carlo second moments, and generators for backbone
//! forests and pseudoforests. Most pieces ship with a brute-force oracle in
//! [`oracle`] so that closed forms can be checked against direct sums.
//!
//! Numeric routines are generic over [`Scalar`] (`f32` or `f64`); the
//! samplers and Monte-Carlo drivers work in `f64`.

pub mod detect;
pub mod enumerate;
mod dsu;
mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod moments;
pub mod oracle;
pub mod orbit;
pub mod sampler;
mod scalar;

pub use error::{Error, Result};
pub use graph::{BinaryGraph, EdgeWeights, Permutation, WeightedGraph};
pub use orbit::{BackboneGraph, CycleDecomposition, CycleType, EdgeOrbit, OrbitClass};
pub use sampler::{ErParams, GaussianParams, ModelParams, SeedSpec};
pub use scalar::Scalar;

/// Weighted graph with double-precision weights.
pub type WeightedGraph64 = WeightedGraph<f64>;
/// Weighted graph with single-precision weights.
pub type WeightedGraph32 = WeightedGraph<f32>;
