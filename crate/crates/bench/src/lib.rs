//! Shared fixtures for the benchmarks.

use bn_core::{rng, BnParams};

/// A reproducible sample of size `n` from `BN(0.5, 1, alpha)`.
pub fn fixture_sample(alpha: f64, n: usize, seed: u64) -> Vec<f64> {
    BnParams { mu: 0.5, sigma: 1.0, alpha }.sample(&mut rng::from_seed(seed), n)
}
