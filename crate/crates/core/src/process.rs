//! Time-indexed BN processes.
//!
//! Each coordinate is `X_t = mu(t) + sigma(t) (Z_t + A_t)` with `Z_t` standard
//! normal and `A_t` a fair `±alpha` coin. How the `(Z_t, A_t)` are shared
//! across indices is a modelling choice, so every generator takes an explicit
//! [`Dependence`].

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_quad, std_normal_cdf};
use crate::rng;
use crate::stats::{ks_critical_value, ks_statistic, variance};
use crate::univariate::BnParams;

/// Joint law of the shocks across indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dependence {
    /// One `(Z, A)` pair drives every coordinate.
    Comonotone,
    /// Fresh `(Z, A)` for every coordinate.
    IndependentShocks,
    /// One shared `A`, fresh `Z` per coordinate.
    SharedSign,
}

impl Dependence {
    pub const ALL: [Dependence; 3] = [Dependence::Comonotone, Dependence::IndependentShocks, Dependence::SharedSign];

    pub fn name(self) -> &'static str {
        match self {
            Dependence::Comonotone => "comonotone",
            Dependence::IndependentShocks => "independent",
            Dependence::SharedSign => "shared-sign",
        }
    }
}

impl fmt::Display for Dependence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A real function of time (or of an index, for triangular arrays).
#[derive(Clone)]
pub enum TimeFunction {
    Constant(f64),
    Linear { intercept: f64, slope: f64 },
    /// `scale * exp(-t²)`.
    Gaussian { scale: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeFunction::Constant(c) => write!(f, "Constant({c})"),
            TimeFunction::Linear { intercept, slope } => write!(f, "Linear({intercept} + {slope} t)"),
            TimeFunction::Gaussian { scale } => write!(f, "Gaussian({scale} exp(-t²))"),
            TimeFunction::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl TimeFunction {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TimeFunction::Custom(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant(c) => *c,
            TimeFunction::Linear { intercept, slope } => intercept + slope * t,
            TimeFunction::Gaussian { scale } => scale * (-t * t).exp(),
            TimeFunction::Custom(f) => f(t),
        }
    }

    /// Only [`Constant`](TimeFunction::Constant) and zero-slope linear functions
    /// count as constant; custom closures are never assumed to be.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            TimeFunction::Constant(c) => Some(*c),
            TimeFunction::Linear { intercept, slope } if *slope == 0.0 => Some(*intercept),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProcessSpec {
    pub mu_fn: TimeFunction,
    pub sigma_fn: TimeFunction,
    pub alpha: f64,
    pub dependence: Dependence,
}

impl ProcessSpec {
    pub fn new(mu_fn: TimeFunction, sigma_fn: TimeFunction, alpha: f64, dependence: Dependence) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self { mu_fn, sigma_fn, alpha, dependence })
    }

    /// Law of the coordinate at time `t`.
    pub fn marginal(&self, t: f64) -> Result<BnParams> {
        BnParams::new(self.mu_fn.eval(t), self.sigma_fn.eval(t), self.alpha)
    }
}

/// Square array `sigma_{n,k} = r^{-k}`, `k = 1..=n`, with means `mu_rule(k)`.
#[derive(Debug, Clone)]
pub struct TriangularArraySpec {
    pub r: f64,
    pub mu_rule: TimeFunction,
    pub alpha: f64,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub dependence: Dependence,
}

impl TriangularArraySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 1.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter(format!("r must exceed 1, got {}", self.r)));
        }
        if self.replications < 2 {
            return Err(Error::InvalidParameter("need at least 2 replications".into()));
        }
        if self.n_values.contains(&0) {
            return Err(Error::InvalidParameter("row lengths must be at least 1".into()));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn sigma(&self, k: usize) -> f64 {
        self.r.powi(-(k as i32))
    }
}

/// Empirical and closed-form ergodicity diagnostics over a list of horizons `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicityReport {
    pub t_values: Vec<f64>,
    /// Variance across simulated paths of the temporal mean.
    pub var_temporal_mean: Vec<f64>,
    /// [`mean_ergodicity_var`] at each `T`.
    pub closed_form_values: Vec<f64>,
    /// Variance across paths of the temporal mean of `(X_t - mu)²`; empirical only.
    pub var_temporal_variance: Vec<f64>,
    /// Grid step used at each `T`.
    pub steps: Vec<f64>,
}

/// Quantities entering the triangular-array CLT conditions for one row length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularConditions {
    pub n: usize,
    pub l: usize,
    /// `min_j sigma_{n,j}²`; a uniform lower bound `c1` would have to sit below this for every `n`.
    pub min_sigma_sq: f64,
    pub max_sigma_cubed: f64,
    /// `max_j sum_k sigma_{n,j} sigma_{n,k}`.
    pub max_row_sum: f64,
    /// The bound `1 / (r - 1)` on the row sum.
    pub row_sum_bound: f64,
    /// `max_j sum_{|k-j| >= l} sigma_{n,j} sigma_{n,k}`.
    pub tail_sum: f64,
    /// Geometric envelope `2 sum_{m >= l} r^{-m}`; two indices sit at each distance `m >= 1`.
    pub tail_envelope: f64,
}

/// KS distances of the standardized row sum for one row length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularRow {
    pub n: usize,
    pub dependence: Dependence,
    pub ks_normal: f64,
    /// Distance to `BN(0, 1, alpha) / sqrt(1 + alpha²)`, the exact law under [`Dependence::Comonotone`].
    pub ks_scaled_bn: f64,
    /// 1% critical value for the replication count.
    pub ks_critical: f64,
}

fn shock<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> (f64, f64) {
    let a = if rng.random::<bool>() { alpha } else { -alpha };
    (rng.sample(StandardNormal), a)
}

/// Standardized shocks `Z_j + A_j` for `m` coordinates under `dependence`.
fn shocks<R: Rng + ?Sized>(rng: &mut R, alpha: f64, m: usize, dependence: Dependence) -> Vec<f64> {
    match dependence {
        Dependence::Comonotone => {
            let (z, a) = shock(rng, alpha);
            vec![z + a; m]
        }
        Dependence::IndependentShocks => (0..m)
            .map(|_| {
                let (z, a) = shock(rng, alpha);
                z + a
            })
            .collect(),
        Dependence::SharedSign => {
            let a = if rng.random::<bool>() { alpha } else { -alpha };
            (0..m)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    z + a
                })
                .collect()
        }
    }
}

/// One path of the process at `times`.
pub fn simulate_process<R: Rng + ?Sized>(spec: &ProcessSpec, times: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("need at least one time point".into()));
    }
    let sigmas: Vec<f64> = times.iter().map(|&t| spec.sigma_fn.eval(t)).collect();
    if let Some((t, s)) = times.iter().zip(&sigmas).find(|(_, s)| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidParameter(format!("sigma({t}) = {s} is not positive")));
    }
    let w = shocks(rng, spec.alpha, times.len(), spec.dependence);
    Ok(times
        .iter()
        .zip(&sigmas)
        .zip(&w)
        .map(|((&t, &s), &e)| spec.mu_fn.eval(t) + s * e)
        .collect())
}

/// `P(X <= x, Y <= y) - P(X <= x) P(Y <= y)` for the comonotone pair
/// `X = muX + sigmaX (Z + A)`, `Y = muY + sigmaY (Z + A)`.
///
/// Both events reduce to `Z + A <= u` and `Z + A <= v` with `u`, `v` the
/// standardized arguments, so the joint probability is the BN cdf at `min(u, v)`.
pub fn pqd_gap(px: &BnParams, py: &BnParams, x: f64, y: f64) -> Result<f64> {
    if px.alpha != py.alpha {
        return Err(Error::InvalidParameter(format!(
            "comonotone pair needs a shared alpha, got {} and {}",
            px.alpha, py.alpha
        )));
    }
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidParameter("pqd_gap needs finite arguments".into()));
    }
    let a = px.alpha;
    let cdf = |w: f64| 0.5 * (std_normal_cdf(w - a) + std_normal_cdf(w + a));
    let (u, v) = (px.standardize(x), py.standardize(y));
    Ok(cdf(u.min(v)) - cdf(u) * cdf(v))
}

/// `(1 / 2T) ∫_{-T}^{T} f(t) dt` by adaptive quadrature.
pub fn time_average(f: &TimeFunction, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("T must be positive, got {t}")));
    }
    Ok(adaptive_quad(|s| f.eval(s), -t, t, 1e-13)? / (2.0 * t))
}

/// `Var(<m_X>_T) = [rho (1 + alpha²) + (1 - rho²) alpha] * ((1/2T) ∫ sigma_t dt)²`.
///
/// `rho` is the correlation coefficient the published variance formula carries.
/// Under [`Dependence::Comonotone`] the exact variance is the `rho = 1` value
/// `(1 + alpha²) * (average sigma)²`.
pub fn mean_ergodicity_var(spec: &ProcessSpec, t: f64, rho: f64) -> Result<f64> {
    if spec.mu_fn.constant_value().is_none() {
        return Err(Error::InvalidParameter("mean ergodicity needs a time-constant mean".into()));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho must lie in [-1, 1], got {rho}")));
    }
    let a = spec.alpha;
    let coefficient = rho * (1.0 + a * a) + (1.0 - rho * rho) * a;
    let avg = time_average(&spec.sigma_fn, t)?;
    Ok(coefficient * avg * avg)
}

/// Trapezoidal `(1 / (t_last - t_first)) ∫ X_t dt` over the path's span.
pub fn temporal_mean(path: &[(f64, f64)]) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidParameter("temporal mean needs at least two points".into()));
    }
    if path.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidParameter("path times must be strictly increasing".into()));
    }
    let integral: f64 = path.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    Ok(integral / (path[path.len() - 1].0 - path[0].0))
}

fn uniform_grid(t: f64, cells: usize) -> Vec<f64> {
    let h = 2.0 * t / cells as f64;
    (0..=cells).map(|i| if i == cells { t } else { -t + h * i as f64 }).collect()
}

fn trapezoid_average(f: &TimeFunction, t: f64, cells: usize) -> f64 {
    let grid = uniform_grid(t, cells);
    let path: Vec<(f64, f64)> = grid.iter().map(|&s| (s, f.eval(s))).collect();
    temporal_mean(&path).expect("uniform grid is increasing")
}

/// Number of grid cells on `[-T, T]`: starting from `initial_step`, the step is
/// halved until halving it once more moves the trapezoid average of `sigma_t` by
/// less than 1% relative.
pub fn choose_cells(sigma_fn: &TimeFunction, t: f64, initial_step: f64) -> Result<usize> {
    if !(initial_step > 0.0) || !(t > 0.0) {
        return Err(Error::InvalidParameter("step and T must be positive".into()));
    }
    let mut cells = ((2.0 * t / initial_step).ceil() as usize).max(1);
    for _ in 0..30 {
        let coarse = trapezoid_average(sigma_fn, t, cells);
        let fine = trapezoid_average(sigma_fn, t, 2 * cells);
        if (fine - coarse).abs() < 0.01 * fine.abs() {
            return Ok(cells);
        }
        cells *= 2;
    }
    Err(Error::QuadratureTolerance { tol: 0.01, estimate: f64::NAN })
}

/// Simulates `paths` paths on `[-T, T]` for each `T` and records the spread of
/// the temporal mean and of the temporal mean of `(X_t - mu)²`. Path `i` at
/// horizon index `j` uses the stream `(master_seed, [j, i])`.
pub fn ergodicity_report(
    spec: &ProcessSpec,
    t_values: &[f64],
    rho: f64,
    paths: usize,
    initial_step: f64,
    master_seed: u64,
) -> Result<ErgodicityReport> {
    let mu = spec
        .mu_fn
        .constant_value()
        .ok_or_else(|| Error::InvalidParameter("ergodicity needs a time-constant mean".into()))?;
    if paths < 2 {
        return Err(Error::InvalidParameter("need at least 2 paths".into()));
    }
    let mut report = ErgodicityReport {
        t_values: t_values.to_vec(),
        var_temporal_mean: Vec::new(),
        closed_form_values: Vec::new(),
        var_temporal_variance: Vec::new(),
        steps: Vec::new(),
    };
    for (j, &t) in t_values.iter().enumerate() {
        let cells = choose_cells(&spec.sigma_fn, t, initial_step)?;
        let grid = uniform_grid(t, cells);
        let mut means = Vec::with_capacity(paths);
        let mut second = Vec::with_capacity(paths);
        for i in 0..paths {
            let mut r = rng::stream(master_seed, &[j as u64, i as u64]);
            let x = simulate_process(spec, &grid, &mut r)?;
            let path: Vec<(f64, f64)> = grid.iter().copied().zip(x.iter().copied()).collect();
            means.push(temporal_mean(&path)?);
            let sq: Vec<(f64, f64)> = path.iter().map(|&(s, v)| (s, (v - mu) * (v - mu))).collect();
            second.push(temporal_mean(&sq)?);
        }
        report.var_temporal_mean.push(variance(&means));
        report.var_temporal_variance.push(variance(&second));
        report.closed_form_values.push(mean_ergodicity_var(spec, t, rho)?);
        report.steps.push(2.0 * t / cells as f64);
    }
    Ok(report)
}

/// Evaluates the CLT conditions for `sigma_{n,k} = r^{-k}`, `k = 1..=n`.
pub fn check_triangular_conditions(spec: &TriangularArraySpec, n: usize, l: usize) -> Result<TriangularConditions> {
    if !(spec.r > 1.0) || n == 0 {
        return Err(Error::InvalidParameter("need r > 1 and n >= 1".into()));
    }
    let s: Vec<f64> = (1..=n).map(|k| spec.sigma(k)).collect();
    let total: f64 = s.iter().sum();
    let mut tail_sum = 0.0f64;
    for j in 0..n {
        let t: f64 = (0..n).filter(|&k| k.abs_diff(j) >= l).map(|k| s[j] * s[k]).fold(0.0, |a, b| a + b);
        tail_sum = tail_sum.max(t);
    }
    let r = spec.r;
    Ok(TriangularConditions {
        n,
        l,
        min_sigma_sq: s.iter().map(|v| v * v).fold(f64::INFINITY, f64::min),
        max_sigma_cubed: s.iter().map(|v| v * v * v).fold(0.0, f64::max),
        max_row_sum: s.iter().map(|v| v * total).fold(0.0, f64::max),
        row_sum_bound: 1.0 / (r - 1.0),
        tail_sum,
        tail_envelope: 2.0 * r.powi(-(l as i32)) * r / (r - 1.0),
    })
}

/// For each row length `n`, simulates `S_n = sum_j (X_{n,j} - mu_{n,j})` over
/// the replications, divides by the empirical standard deviation, and measures
/// the KS distance to the standard normal and to the scaled BN law. Replication
/// `i` of row `n_values[j]` uses the stream `(master_seed, [j, i])`.
pub fn triangular_sum_experiment(spec: &TriangularArraySpec, master_seed: u64) -> Result<Vec<TriangularRow>> {
    spec.validate()?;
    let scaled_bn = BnParams::new(0.0, 1.0 / (1.0 + spec.alpha * spec.alpha).sqrt(), spec.alpha)?;
    let mut rows = Vec::with_capacity(spec.n_values.len());
    for (j, &n) in spec.n_values.iter().enumerate() {
        let sums: Vec<f64> = (0..spec.replications)
            .map(|i| {
                let mut r = rng::stream(master_seed, &[j as u64, i as u64]);
                let w = shocks(&mut r, spec.alpha, n, spec.dependence);
                (1..=n)
                    .zip(&w)
                    .map(|(k, &e)| {
                        let mu = spec.mu_rule.eval(k as f64);
                        (mu + spec.sigma(k) * e) - mu
                    })
                    .sum()
            })
            .collect();
        let sd = variance(&sums).sqrt();
        let standardized: Vec<f64> = sums.iter().map(|s| s / sd).collect();
        rows.push(TriangularRow {
            n,
            dependence: spec.dependence,
            ks_normal: ks_statistic(&standardized, std_normal_cdf),
            ks_scaled_bn: ks_statistic(&standardized, |x| scaled_bn.cdf(x)),
            ks_critical: ks_critical_value(spec.replications, 0.01),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::erf;
    use crate::stats;

    fn bn(mu: f64, sigma: f64, alpha: f64) -> BnParams {
        BnParams::new(mu, sigma, alpha).unwrap()
    }

    fn spec(mu: TimeFunction, sigma: TimeFunction, alpha: f64, dependence: Dependence) -> ProcessSpec {
        ProcessSpec::new(mu, sigma, alpha, dependence).unwrap()
    }

    #[test]
    fn pqd_gap_examples() {
        let (px, py) = (bn(0.0, 1.0, 2.0), bn(1.0, 2.0, 2.0));
        assert!(pqd_gap(&px, &py, -40.0, 3.0).unwrap().abs() < 1e-12);
        let n = bn(0.0, 1.0, 0.0);
        assert!((pqd_gap(&n, &n, 0.0, 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(pqd_gap(&px, &bn(0.0, 1.0, 1.0), 0.0, 0.0).is_err());
        let mut min = f64::INFINITY;
        for i in 0..=56 {
            for j in 0..=56 {
                min = min.min(pqd_gap(&px, &py, -6.0 + 0.25 * i as f64, -6.0 + 0.25 * j as f64).unwrap());
            }
        }
        assert!(min >= -1e-12);
    }

    #[test]
    fn pqd_gap_matches_simulation() {
        let (px, py) = (bn(0.0, 1.0, 2.0), bn(1.0, 2.0, 2.0));
        let s = spec(TimeFunction::Constant(0.0), TimeFunction::Constant(1.0), 2.0, Dependence::Comonotone);
        let mut r = rng::from_seed(12);
        let w: Vec<f64> = (0..200_000).map(|_| simulate_process(&s, &[0.0], &mut r).unwrap()[0]).collect();
        for (x, y) in [(-1.0, 0.0), (0.0, 1.0), (1.5, 4.0)] {
            let ind: Vec<(f64, f64)> = w
                .iter()
                .map(|&e| {
                    let (a, b) = (px.mu + px.sigma * e <= x, py.mu + py.sigma * e <= y);
                    (f64::from(u8::from(a)), f64::from(u8::from(b)))
                })
                .collect();
            let (ax, bx): (Vec<f64>, Vec<f64>) = ind.iter().copied().unzip();
            let gap_terms: Vec<f64> = ind.iter().map(|(a, b)| a * b).collect();
            let est = stats::mean(&gap_terms) - stats::mean(&ax) * stats::mean(&bx);
            let se = stats::std_error(&gap_terms) + 1e-3;
            assert!((est - pqd_gap(&px, &py, x, y).unwrap()).abs() < 4.0 * se);
        }
    }

    #[test]
    fn comonotone_paths_are_affine_images() {
        let s = spec(TimeFunction::Linear { intercept: 1.0, slope: 2.0 }, TimeFunction::Gaussian { scale: 2.0 }, 1.5, Dependence::Comonotone);
        let times = [-1.0, 0.0, 0.5, 2.0];
        let x = simulate_process(&s, &times, &mut rng::from_seed(3)).unwrap();
        let e: Vec<f64> = times.iter().zip(&x).map(|(&t, &v)| (v - s.mu_fn.eval(t)) / s.sigma_fn.eval(t)).collect();
        assert!(e.iter().all(|v| (v - e[0]).abs() < 1e-12));
    }

    #[test]
    fn dependence_modes_correlations() {
        let times = [0.0, 1.0];
        let draw = |d: Dependence| {
            let s = spec(TimeFunction::Constant(0.0), TimeFunction::Linear { intercept: 1.0, slope: 0.5 }, 2.0, d);
            let mut r = rng::from_seed(9);
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for _ in 0..100_000 {
                let x = simulate_process(&s, &times, &mut r).unwrap();
                a.push(x[0]);
                b.push(x[1]);
            }
            (a, b)
        };
        let (a, b) = draw(Dependence::Comonotone);
        assert!((stats::correlation(&a, &b) - 1.0).abs() < 1e-3);
        let prods: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let cov = stats::covariance(&a, &b);
        assert!((cov - 1.0 * 1.5 * 5.0).abs() < 4.0 * stats::std_error(&prods));
        let (a, b) = draw(Dependence::IndependentShocks);
        assert!(stats::correlation(&a, &b).abs() < 4.0 / (1e5f64).sqrt());
        // shared sign: Cov = sigma_s sigma_t alpha²
        let (a, b) = draw(Dependence::SharedSign);
        let prods: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        assert!((stats::covariance(&a, &b) - 1.5 * 4.0).abs() < 4.0 * stats::std_error(&prods));
    }

    #[test]
    fn marginals_pass_ks() {
        for d in Dependence::ALL {
            let s = spec(TimeFunction::Linear { intercept: 0.5, slope: 1.0 }, TimeFunction::Gaussian { scale: 3.0 }, 2.0, d);
            let times = [-0.5, 0.3];
            let mut r = rng::from_seed(44);
            let paths: Vec<Vec<f64>> = (0..10_000).map(|_| simulate_process(&s, &times, &mut r).unwrap()).collect();
            for (k, &t) in times.iter().enumerate() {
                let col: Vec<f64> = paths.iter().map(|p| p[k]).collect();
                let law = s.marginal(t).unwrap();
                assert!(ks_statistic(&col, |x| law.cdf(x)) < ks_critical_value(col.len(), 0.01), "{d} at {t}");
            }
        }
    }

    #[test]
    fn non_stationary_mean() {
        let s = spec(TimeFunction::Linear { intercept: 0.0, slope: 1.0 }, TimeFunction::Constant(1.0), 2.0, Dependence::IndependentShocks);
        let mut r = rng::from_seed(5);
        let paths: Vec<Vec<f64>> = (0..20_000).map(|_| simulate_process(&s, &[0.0, 5.0], &mut r).unwrap()).collect();
        let a: Vec<f64> = paths.iter().map(|p| p[0]).collect();
        let b: Vec<f64> = paths.iter().map(|p| p[1]).collect();
        let shift = stats::mean(&b) - stats::mean(&a);
        let se = (stats::std_error(&a).powi(2) + stats::std_error(&b).powi(2)).sqrt();
        assert!((shift - 5.0).abs() < 4.0 * se);
        assert!(shift > 100.0 * se);
    }

    #[test]
    fn simulate_rejects_bad_input() {
        let s = spec(TimeFunction::Constant(0.0), TimeFunction::Linear { intercept: 0.0, slope: 1.0 }, 1.0, Dependence::Comonotone);
        assert!(simulate_process(&s, &[], &mut rng::from_seed(1)).is_err());
        assert!(simulate_process(&s, &[-1.0], &mut rng::from_seed(1)).is_err());
    }

    #[test]
    fn ergodicity_closed_form() {
        let s = spec(TimeFunction::Constant(0.0), TimeFunction::Gaussian { scale: 1.0 }, 2.0, Dependence::Comonotone);
        let avg = time_average(&s.sigma_fn, 10.0).unwrap();
        assert!((avg - 0.088_622_692_545_275_8).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for t in [1.0, 2.0, 5.0, 10.0, 20.0] {
            let closed = std::f64::consts::PI.sqrt() * erf(t) / (2.0 * t);
            assert!((time_average(&s.sigma_fn, t).unwrap() - closed).abs() < 1e-12);
            let v = mean_ergodicity_var(&s, t, 0.5).unwrap();
            let coefficient = 0.5 * 5.0 + 0.75 * 2.0;
            assert!((v - coefficient * closed * closed).abs() < 1e-12);
            assert!(v < last);
            last = v;
        }
        let flat = spec(TimeFunction::Constant(0.0), TimeFunction::Constant(1.0), 1.0, Dependence::Comonotone);
        for t in [1.0, 7.0, 50.0] {
            assert!((time_average(&flat.sigma_fn, t).unwrap() - 1.0).abs() < 1e-14);
        }
        let moving = spec(TimeFunction::Linear { intercept: 0.0, slope: 1.0 }, TimeFunction::Constant(1.0), 1.0, Dependence::Comonotone);
        assert!(mean_ergodicity_var(&moving, 1.0, 0.5).is_err());
        assert!(mean_ergodicity_var(&s, 0.0, 0.5).is_err());
    }

    #[test]
    fn empirical_ergodicity_matches_comonotone_value() {
        let s = spec(TimeFunction::Constant(1.0), TimeFunction::Gaussian { scale: 1.0 }, 2.0, Dependence::Comonotone);
        let report = ergodicity_report(&s, &[1.0, 2.0, 5.0], 1.0, 4000, 0.5, 77).unwrap();
        for k in 0..3 {
            let (emp, closed) = (report.var_temporal_mean[k], report.closed_form_values[k]);
            // Sample variance of 4000 draws of a BN-scaled variable: relative SE ~ sqrt((kurt - 1)/n).
            assert!(((emp - closed) / closed).abs() < 0.1, "T index {k}: {emp} vs {closed}");
        }
        assert!(report.var_temporal_mean.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(report.steps.len(), 3);
    }

    #[test]
    fn temporal_mean_examples() {
        let constant: Vec<(f64, f64)> = (0..11).map(|i| (i as f64, 3.5)).collect();
        assert!((temporal_mean(&constant).unwrap() - 3.5).abs() < 1e-15);
        let odd: Vec<(f64, f64)> = (0..=40).map(|i| {
            let t = -2.0 + 0.1 * i as f64;
            (t, t)
        }).collect();
        assert!(temporal_mean(&odd).unwrap().abs() < 1e-14);
        let smooth = |m: usize| {
            let p: Vec<(f64, f64)> = (0..=m).map(|i| {
                let t = -3.0 + 6.0 * i as f64 / m as f64;
                (t, (t).sin() + (-t * t).exp())
            }).collect();
            temporal_mean(&p).unwrap()
        };
        assert!((smooth(100) - smooth(200)).abs() < 1e-3);
        assert!(temporal_mean(&[(0.0, 1.0)]).is_err());
        assert!(temporal_mean(&[(1.0, 1.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn halving_rule_refines_narrow_peaks() {
        let g = TimeFunction::Gaussian { scale: 1.0 };
        let cells = choose_cells(&g, 20.0, 4.0).unwrap();
        let a = trapezoid_average(&g, 20.0, cells);
        let b = trapezoid_average(&g, 20.0, 2 * cells);
        assert!((a - b).abs() < 0.01 * b);
        assert!(cells > 10);
    }

    fn tri(r: f64, alpha: f64, dependence: Dependence, n_values: Vec<usize>, replications: usize) -> TriangularArraySpec {
        TriangularArraySpec { r, mu_rule: TimeFunction::Linear { intercept: 1.0, slope: 0.1 }, alpha, n_values, replications, dependence }
    }

    #[test]
    fn triangular_conditions() {
        let s = tri(2.0, 1.0, Dependence::IndependentShocks, vec![10], 100);
        let c = check_triangular_conditions(&s, 10, 0).unwrap();
        assert!(c.max_row_sum <= c.row_sum_bound);
        assert!((c.row_sum_bound - 1.0).abs() < 1e-15);
        assert!((c.min_sigma_sq - 2f64.powi(-20)).abs() < 1e-20);
        assert!((c.max_sigma_cubed - 0.125).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for l in 0..=20 {
            let c = check_triangular_conditions(&s, 10, l).unwrap();
            assert!(c.tail_sum <= last);
            assert!(c.tail_sum <= c.tail_envelope);
            last = c.tail_sum;
        }
        assert_eq!(last, 0.0);
        let mins: Vec<f64> = [5, 10, 20, 40].iter().map(|&n| check_triangular_conditions(&s, n, 0).unwrap().min_sigma_sq).collect();
        assert!(mins.windows(2).all(|w| w[1] < w[0]));
        assert!(mins[3] < 1e-20);
    }

    #[test]
    fn independent_normal_sums_are_normal() {
        let s = tri(2.0, 0.0, Dependence::IndependentShocks, vec![50], 4000);
        let rows = triangular_sum_experiment(&s, 1).unwrap();
        assert!(rows[0].ks_normal < rows[0].ks_critical);
    }

    #[test]
    fn comonotone_sums_stay_bimodal() {
        let s = tri(2.0, 2.0, Dependence::Comonotone, vec![10, 50], 4000);
        for row in triangular_sum_experiment(&s, 2).unwrap() {
            assert!(row.ks_scaled_bn < row.ks_critical, "{row:?}");
            assert!(row.ks_normal > 0.05, "{row:?}");
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let s = tri(1.5, 1.0, Dependence::SharedSign, vec![5, 20], 500);
        assert_eq!(triangular_sum_experiment(&s, 8).unwrap(), triangular_sum_experiment(&s, 8).unwrap());
        assert!(tri(1.0, 1.0, Dependence::SharedSign, vec![5], 500).validate().is_err());
    }
}
