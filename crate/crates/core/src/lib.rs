//! The bimodal normal (BN) distribution and its bivariate extension.
//!
//! A BN law with parameters `(mu, sigma, alpha)` has density
//!
//! ```text
//! f(x) = exp(-z²/2 - alpha²/2) cosh(alpha z) / sqrt(2 pi sigma²),   z = (x - mu) / sigma
//! ```
//!
//! which is the equal-weight mixture of `N(mu + alpha sigma, sigma²)` and
//! `N(mu - alpha sigma, sigma²)`. It is unimodal for `|alpha| <= 1` and bimodal
//! otherwise.
//!
//! Modules:
//!
//! - [`numerics`]: special functions, quadrature and root finding.
//! - [`univariate`]: density, distribution function, moments, modes, sampling.
//! - [`fit`]: likelihood, score, maximum-likelihood solvers, Fisher information.
//! - [`bivariate`]: the bivariate extension, its marginals and covariance.
//! - [`process`]: time-indexed BN processes and the triangular-array experiments.
//! - [`rng`]: counter-based seed derivation for reproducible parallel streams.
//! - [`stats`]: Kolmogorov-Smirnov distances and small summary helpers.

// Guards of the form `!(x > 0.0)` are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod bivariate;
pub mod error;
pub mod fit;
pub mod numerics;
pub mod process;
pub mod rng;
pub mod stats;
pub mod univariate;

pub use error::{Error, Result};
pub use bivariate::{BbnMixture, BbnParams};
pub use fit::{FitConfig, FitResult, Init};
pub use process::{Dependence, ErgodicityReport, ProcessSpec, TimeFunction, TriangularArraySpec};
pub use univariate::{BnMixture, BnParams, ModeKind, ModeSet};
