//! Maximum-likelihood estimation for BN samples.
//!
//! Two independent solvers are provided: [`mle_fixed_point`] iterates the
//! likelihood equations cyclically, and [`mle_newton`] runs a line-searched
//! Newton iteration on the score. Both constrain `alpha >= 0`; the likelihood is
//! even in `alpha`, so the sign is not identifiable.

use std::sync::OnceLock;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{
    expect_std_normal, find_root, gauss_hermite, integrate_real_line, std_normal_pdf,
    std_normal_quantile, QuadratureRule, RootBracket,
};
use crate::univariate::BnParams;

/// Gauss-Hermite order used for the Fisher information.
pub const FISHER_HERMITE_ORDER: usize = 256;

/// Largest `|alpha|` searched by [`profile_alpha_mle`].
pub const PROFILE_ALPHA_CAP: f64 = 50.0;

/// Starting point strategy for the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    /// `mu0` = sample mean, `alpha0` from the sample kurtosis, `sigma0` from the variance.
    MomentMatch,
    Manual(BnParams),
    /// Best log-likelihood over `alpha` in `0, 0.25, ..., 6` with moment-matched `mu`, `sigma`.
    GridScan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Which of `(mu, sigma, alpha)` are estimated.
    pub estimate_mask: [bool; 3],
    /// Values for the coordinates that are held fixed.
    pub fixed_values: [Option<f64>; 3],
    pub init: Init,
    pub max_iter: usize,
    /// Target for the sup-norm of the per-observation score (score / n) over
    /// the free coordinates.
    pub tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            estimate_mask: [true; 3],
            fixed_values: [None; 3],
            init: Init::MomentMatch,
            max_iter: 500,
            tol: 1e-10,
        }
    }
}

impl FitConfig {
    /// `mu` and `sigma` known, `alpha` estimated.
    pub fn alpha_only(mu: f64, sigma: f64) -> Self {
        Self {
            estimate_mask: [false, false, true],
            fixed_values: [Some(mu), Some(sigma), None],
            ..Self::default()
        }
    }

    pub fn with_fixed(mut self, index: usize, value: f64) -> Self {
        self.estimate_mask[index] = false;
        self.fixed_values[index] = Some(value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.estimate_mask.iter().any(|&f| f) {
            return Err(Error::InvalidParameter("at least one parameter must be free".into()));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParameter("need tol > 0 and max_iter >= 1".into()));
        }
        for (i, name) in ["mu", "sigma", "alpha"].iter().enumerate() {
            if !self.estimate_mask[i] && self.fixed_values[i].is_none() {
                return Err(Error::InvalidParameter(format!("{name} is fixed but has no value")));
            }
        }
        if let Some(s) = self.fixed_values[1] {
            if !self.estimate_mask[1] && !(s > 0.0) {
                return Err(Error::InvalidParameter(format!("fixed sigma must be positive, got {s}")));
            }
        }
        Ok(())
    }

    fn free(&self) -> Vec<usize> {
        (0..3).filter(|&i| self.estimate_mask[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Estimates with `alpha >= 0`.
    pub theta_hat: BnParams,
    pub n: usize,
    pub loglik: f64,
    /// Sup-norm of `score / n` over the free coordinates.
    pub score_sup_norm: f64,
    /// Per-observation information for `alpha` at `theta_hat.alpha`, treating
    /// `mu` and `sigma` as known.
    pub fisher_info_alpha: f64,
    /// `1 / sqrt(n I(alpha_hat))`; `None` when `alpha` is fixed or `I` vanishes.
    pub se_alpha: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Iterations where the Newton solver fell back to a fixed-point sweep.
    pub fallback_steps: usize,
    /// `(iteration, loglik)` after each accepted step, starting at iteration 0.
    pub trace: Vec<(usize, f64)>,
}

impl Serialize for FitResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FitResult", 9)?;
        s.serialize_field("mu", &self.theta_hat.mu)?;
        s.serialize_field("sigma", &self.theta_hat.sigma)?;
        s.serialize_field("alpha", &self.theta_hat.alpha)?;
        s.serialize_field("loglik", &self.loglik)?;
        s.serialize_field("score_sup_norm", &self.score_sup_norm)?;
        s.serialize_field("fisher_info_alpha", &self.fisher_info_alpha)?;
        s.serialize_field("se_alpha", &self.se_alpha)?;
        s.serialize_field("iterations", &self.iterations)?;
        s.serialize_field("converged", &self.converged)?;
        s.end()
    }
}

fn check_data(data: &[f64]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if let Some(x) = data.iter().find(|x| !x.is_finite()) {
        return Err(Error::DegenerateData(format!("non-finite observation {x}")));
    }
    Ok(())
}

/// `sum_i log f(x_i; theta)`, additive constant included.
pub fn log_likelihood(theta: &BnParams, data: &[f64]) -> Result<f64> {
    check_data(data)?;
    Ok(data.iter().map(|&x| theta.log_pdf(x)).sum())
}

/// Partial derivatives of the log-likelihood in `(mu, sigma, alpha)`.
pub fn score(theta: &BnParams, data: &[f64]) -> Result<[f64; 3]> {
    check_data(data)?;
    let (s, a) = (theta.sigma, theta.alpha);
    let n = data.len() as f64;
    let (mut sum_z, mut sum_t, mut sum_z2, mut sum_zt) = (0.0, 0.0, 0.0, 0.0);
    for &x in data {
        let z = theta.standardize(x);
        let t = (a * z).tanh();
        sum_z += z;
        sum_t += t;
        sum_z2 += z * z;
        sum_zt += z * t;
    }
    Ok([
        (sum_z - a * sum_t) / s,
        (-n + sum_z2 - a * sum_zt) / s,
        -a * n + sum_zt,
    ])
}

/// Second derivatives of the log-likelihood in `(mu, sigma, alpha)`.
pub fn hessian(theta: &BnParams, data: &[f64]) -> Result<[[f64; 3]; 3]> {
    check_data(data)?;
    let (s, a) = (theta.sigma, theta.alpha);
    let n = data.len() as f64;
    let (mut mm, mut ms, mut ma, mut ss, mut sa, mut aa) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &x in data {
        let z = theta.standardize(x);
        let t = (a * z).tanh();
        let sech2 = 1.0 - t * t;
        mm += 1.0 - a * a * sech2;
        ms += (z - a * t) + z * (1.0 - a * a * sech2);
        ma += t + a * z * sech2;
        ss += 3.0 * z * z - 2.0 * a * z * t - a * a * z * z * sech2;
        sa += z * t + a * z * z * sech2;
        aa += z * z * sech2;
    }
    let s2 = s * s;
    let h_mm = -mm / s2;
    let h_ms = -ms / s2;
    let h_ma = -ma / s;
    let h_ss = n / s2 - ss / s2;
    let h_sa = -sa / s;
    let h_aa = -n + aa;
    Ok([[h_mm, h_ms, h_ma], [h_ms, h_ss, h_sa], [h_ma, h_sa, h_aa]])
}

/// Residuals of the three likelihood equations at `theta`, each written as
/// `parameter - update(parameter)`:
///
/// - `mu - [x̄ - sigma alpha mean(tanh(alpha z))]`
/// - `sigma² - sum (x - mu)² / ((1 + alpha²) n)`
/// - `alpha - mean(z tanh(alpha z))`
pub fn likelihood_equation_residuals(theta: &BnParams, data: &[f64]) -> Result<[f64; 3]> {
    check_data(data)?;
    let n = data.len() as f64;
    let (mu, s, a) = (theta.mu, theta.sigma, theta.alpha);
    let mean = data.iter().sum::<f64>() / n;
    let mean_t = data.iter().map(|&x| (a * theta.standardize(x)).tanh()).sum::<f64>() / n;
    let ss = data.iter().map(|&x| (x - mu) * (x - mu)).sum::<f64>();
    let mean_zt = data
        .iter()
        .map(|&x| {
            let z = theta.standardize(x);
            z * (a * z).tanh()
        })
        .sum::<f64>()
        / n;
    Ok([
        mu - (mean - s * a * mean_t),
        s * s - ss / ((1.0 + a * a) * n),
        a - mean_zt,
    ])
}

/// Sup-norm of the averaged score. The summed score carries rounding error of
/// order `eps * sum z²`, so an absolute target on it stops being reachable as
/// `n` grows; dividing by `n` keeps `tol` meaningful at any sample size.
fn sup_norm_free(g: &[f64; 3], free: &[usize], n: usize) -> f64 {
    free.iter().map(|&i| g[i].abs()).fold(0.0, f64::max) / n as f64
}

fn with_coordinate(theta: BnParams, index: usize, value: f64) -> BnParams {
    let mut t = theta;
    match index {
        0 => t.mu = value,
        1 => t.sigma = value,
        _ => t.alpha = value,
    }
    t
}

fn coordinate(theta: &BnParams, index: usize) -> f64 {
    match index {
        0 => theta.mu,
        1 => theta.sigma,
        _ => theta.alpha,
    }
}

/// Ratio `E[(X - mu)^4] / Var(X)²` as a function of `alpha`; decreases from 3 to 1.
fn kurtosis_of_alpha(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    (a2 * a2 + 6.0 * a2 + 3.0) / ((1.0 + a2) * (1.0 + a2))
}

/// Moment-matching start: `mu0` = sample mean (or the fixed value),
/// `alpha0` solves `m4 / m2² = (alpha⁴ + 6 alpha² + 3) / (1 + alpha²)²` on
/// `[0, 10]` (falls back to 1 when the sample kurtosis is at least 3), and
/// `sigma0² = m2 / (1 + alpha0²)`.
pub fn moment_match_init(data: &[f64], config: &FitConfig) -> Result<BnParams> {
    check_data(data)?;
    let n = data.len() as f64;
    let mu = if config.estimate_mask[0] {
        data.iter().sum::<f64>() / n
    } else {
        config.fixed_values[0].expect("validated")
    };
    let m2 = data.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n;
    let m4 = data.iter().map(|x| (x - mu).powi(4)).sum::<f64>() / n;
    if !(m2 > 0.0) {
        return Err(Error::DegenerateData("all observations coincide with the location".into()));
    }
    let alpha = if config.estimate_mask[2] {
        let k = m4 / (m2 * m2);
        let f = |a: f64| kurtosis_of_alpha(a) - k;
        if k >= 3.0 {
            1.0
        } else if k <= kurtosis_of_alpha(10.0) {
            10.0
        } else {
            let bracket = RootBracket::new(f, 0.0, 10.0)?;
            find_root(f, &bracket, 1e-12)?
        }
    } else {
        config.fixed_values[2].expect("validated").abs()
    };
    let sigma = if config.estimate_mask[1] {
        (m2 / (1.0 + alpha * alpha)).sqrt()
    } else {
        config.fixed_values[1].expect("validated")
    };
    BnParams::new(mu, sigma, alpha)
}

fn initial_point(data: &[f64], config: &FitConfig) -> Result<BnParams> {
    let mm = moment_match_init(data, config)?;
    let start = match config.init {
        Init::MomentMatch => mm,
        Init::Manual(p) => p,
        Init::GridScan => {
            let mut best = (f64::NEG_INFINITY, mm);
            if config.estimate_mask[2] {
                let m2 = data.iter().map(|x| (x - mm.mu).powi(2)).sum::<f64>() / data.len() as f64;
                for k in 0..=24 {
                    let a = 0.25 * k as f64;
                    let sigma = if config.estimate_mask[1] { (m2 / (1.0 + a * a)).sqrt() } else { mm.sigma };
                    let cand = BnParams::new(mm.mu, sigma, a)?;
                    let ll = log_likelihood(&cand, data)?;
                    if ll > best.0 {
                        best = (ll, cand);
                    }
                }
            }
            best.1
        }
    };
    // Fixed coordinates always take their configured values.
    let mut p = start;
    for i in 0..3 {
        if !config.estimate_mask[i] {
            p = with_coordinate(p, i, config.fixed_values[i].expect("validated"));
        }
    }
    BnParams::new(p.mu, p.sigma, p.alpha).map(BnParams::canonical)
}

fn check_fit_input(data: &[f64], config: &FitConfig) -> Result<()> {
    config.validate()?;
    check_data(data)?;
    if config.estimate_mask.iter().all(|&f| f) && data.len() < 3 {
        return Err(Error::DegenerateData(format!(
            "need at least 3 observations to estimate all parameters, got {}",
            data.len()
        )));
    }
    let first = data[0];
    if data.iter().all(|&x| x == first) {
        return Err(Error::DegenerateData("all observations are identical".into()));
    }
    Ok(())
}

/// One cyclic sweep of the likelihood equations over the free coordinates.
fn fixed_point_sweep(theta: BnParams, data: &[f64], config: &FitConfig) -> BnParams {
    let n = data.len() as f64;
    let mut t = theta;
    if config.estimate_mask[0] {
        let mean = data.iter().sum::<f64>() / n;
        let mean_t = data.iter().map(|&x| (t.alpha * t.standardize(x)).tanh()).sum::<f64>() / n;
        t.mu = mean - t.sigma * t.alpha * mean_t;
    }
    if config.estimate_mask[1] {
        let ss = data.iter().map(|&x| (x - t.mu) * (x - t.mu)).sum::<f64>();
        let var = if config.estimate_mask[2] {
            ss / ((1.0 + t.alpha * t.alpha) * n)
        } else {
            // alpha held fixed: sigma² = [sum (x-mu)² - alpha sigma sum (x-mu) tanh(alpha z)] / n
            let cross = data
                .iter()
                .map(|&x| (x - t.mu) * (t.alpha * t.standardize(x)).tanh())
                .sum::<f64>();
            (ss - t.alpha * t.sigma * cross) / n
        };
        if var > 0.0 {
            t.sigma = var.sqrt();
        }
    }
    if config.estimate_mask[2] {
        t.alpha = data
            .iter()
            .map(|&x| {
                let z = t.standardize(x);
                z * (t.alpha * z).tanh()
            })
            .sum::<f64>()
            / n;
        t.alpha = t.alpha.abs();
    }
    t
}

fn finish(
    theta: BnParams,
    data: &[f64],
    config: &FitConfig,
    iterations: usize,
    fallback_steps: usize,
    trace: Vec<(usize, f64)>,
) -> Result<FitResult> {
    let theta = theta.canonical();
    let free = config.free();
    let g = score(&theta, data)?;
    let score_sup_norm = sup_norm_free(&g, &free, data.len());
    let info = fisher_info_alpha(theta.alpha);
    let n = data.len();
    let se_alpha = if config.estimate_mask[2] && info > 0.0 {
        Some(1.0 / (n as f64 * info).sqrt())
    } else {
        None
    };
    Ok(FitResult {
        theta_hat: theta,
        n,
        loglik: log_likelihood(&theta, data)?,
        score_sup_norm,
        fisher_info_alpha: info,
        se_alpha,
        iterations,
        converged: score_sup_norm <= config.tol,
        fallback_steps,
        trace,
    })
}

/// Cyclic iteration of the likelihood equations
/// `mu = x̄ - sigma alpha mean(tanh(alpha z))`,
/// `sigma² = sum (x - mu)² / ((1 + alpha²) n)`,
/// `alpha = mean(z tanh(alpha z))`, stopping on the score sup-norm.
pub fn mle_fixed_point(data: &[f64], config: &FitConfig) -> Result<FitResult> {
    check_fit_input(data, config)?;
    let free = config.free();
    let mut theta = initial_point(data, config)?;
    let mut trace = vec![(0, log_likelihood(&theta, data)?)];
    let mut iterations = 0;
    while iterations < config.max_iter {
        if sup_norm_free(&score(&theta, data)?, &free, data.len()) <= config.tol {
            break;
        }
        let next = fixed_point_sweep(theta, data, config);
        iterations += 1;
        let stalled = next == theta;
        theta = next;
        trace.push((iterations, log_likelihood(&theta, data)?));
        if stalled {
            break;
        }
    }
    finish(theta, data, config, iterations, 0, trace)
}

/// Solves `A x = b` for a symmetric positive definite `A` (row-major, `k x k`)
/// by Cholesky; `None` if `A` is not numerically positive definite.
fn cholesky_solve(a: &[f64], b: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut sum = a[i * k + j];
            for m in 0..j {
                sum -= l[i * k + m] * l[j * k + m];
            }
            if i == j {
                if !(sum > 1e-14 * a[i * k + i].abs().max(f64::MIN_POSITIVE)) {
                    return None;
                }
                l[i * k + i] = sum.sqrt();
            } else {
                l[i * k + j] = sum / l[j * k + j];
            }
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        let mut sum = b[i];
        for m in 0..i {
            sum -= l[i * k + m] * y[m];
        }
        y[i] = sum / l[i * k + i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut sum = y[i];
        for m in (i + 1)..k {
            sum -= l[m * k + i] * x[m];
        }
        x[i] = sum / l[i * k + i];
    }
    Some(x)
}

/// Newton's method on the score with a backtracking line search on the
/// log-likelihood. When the negated Hessian is not positive definite, or the
/// search finds no ascent, a fixed-point sweep is tried instead; those steps
/// are counted in `fallback_steps`.
///
/// A step is accepted when the log-likelihood does not decrease, or when it
/// changes by less than `1e-13 |l|` while the score shrinks (the last steps
/// before convergence sit at rounding level).
pub fn mle_newton(data: &[f64], config: &FitConfig) -> Result<FitResult> {
    check_fit_input(data, config)?;
    let free = config.free();
    let k = free.len();
    let mut theta = initial_point(data, config)?;
    let mut ll = log_likelihood(&theta, data)?;
    let mut trace = vec![(0, ll)];
    let mut fallback_steps = 0;
    let mut iterations = 0;

    let acceptable = |cand: &BnParams, ll_cand: f64, ll: f64, g_norm: f64| -> Result<bool> {
        if !ll_cand.is_finite() {
            return Ok(false);
        }
        if ll_cand >= ll {
            return Ok(true);
        }
        if ll_cand >= ll - 1e-13 * ll.abs() {
            return Ok(sup_norm_free(&score(cand, data)?, &free, data.len()) < g_norm);
        }
        Ok(false)
    };

    while iterations < config.max_iter {
        let g = score(&theta, data)?;
        let g_norm = sup_norm_free(&g, &free, data.len());
        if g_norm <= config.tol {
            break;
        }
        iterations += 1;
        let h = hessian(&theta, data)?;
        let neg_h: Vec<f64> = free.iter().flat_map(|&i| free.iter().map(move |&j| -h[i][j])).collect();
        let rhs: Vec<f64> = free.iter().map(|&i| g[i]).collect();

        let mut accepted = None;
        if let Some(step) = cholesky_solve(&neg_h, &rhs, k) {
            let mut t = 1.0;
            for _ in 0..60 {
                let mut cand = theta;
                for (idx, &i) in free.iter().enumerate() {
                    cand = with_coordinate(cand, i, coordinate(&theta, i) + t * step[idx]);
                }
                cand.alpha = cand.alpha.abs();
                if cand.sigma > 0.0 && cand.mu.is_finite() && cand.alpha.is_finite() {
                    let ll_cand = log_likelihood(&cand, data)?;
                    if acceptable(&cand, ll_cand, ll, g_norm)? {
                        accepted = Some((cand, ll_cand));
                        break;
                    }
                }
                t *= 0.5;
            }
        }
        if accepted.is_none() {
            let cand = fixed_point_sweep(theta, data, config);
            let ll_cand = log_likelihood(&cand, data)?;
            if acceptable(&cand, ll_cand, ll, g_norm)? {
                fallback_steps += 1;
                accepted = Some((cand, ll_cand));
            }
        }
        match accepted {
            Some((cand, ll_cand)) => {
                theta = cand;
                ll = ll_cand;
                trace.push((iterations, ll));
            }
            None => break,
        }
    }
    finish(theta, data, config, iterations, fallback_steps, trace)
}

/// Nonnegative root in `alpha` of `-alpha n + sum z tanh(alpha z)` with `mu`,
/// `sigma` known.
///
/// The map `alpha -> mean(z tanh(alpha z)) - alpha` is concave on `alpha >= 0`
/// and vanishes at 0, so a positive root exists exactly when `mean(z²) > 1`, and
/// it is then unique. Otherwise the root is 0.
pub fn profile_alpha_mle(data: &[f64], mu: f64, sigma: f64) -> Result<f64> {
    check_data(data)?;
    let base = BnParams::new(mu, sigma, 0.0)?;
    let z: Vec<f64> = data.iter().map(|&x| base.standardize(x)).collect();
    let n = z.len() as f64;
    let psi = |a: f64| z.iter().map(|&zi| zi * (a * zi).tanh()).sum::<f64>() / n - a;
    let mean_z2 = z.iter().map(|zi| zi * zi).sum::<f64>() / n;
    if mean_z2 <= 1.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while psi(hi) >= 0.0 {
        hi *= 2.0;
        if hi > PROFILE_ALPHA_CAP {
            if psi(PROFILE_ALPHA_CAP) >= 0.0 {
                return Err(Error::BracketCapExceeded(PROFILE_ALPHA_CAP));
            }
            hi = PROFILE_ALPHA_CAP;
            break;
        }
    }
    let mut lo = hi / 2.0;
    while psi(lo) <= 0.0 {
        lo /= 2.0;
        if lo < 1e-300 {
            return Ok(0.0);
        }
    }
    let bracket = RootBracket::new(psi, lo, hi)?;
    find_root(psi, &bracket, 1e-13)
}

/// A root in `mu` of the `mu`-score with `sigma`, `alpha` known, found by
/// widening a bracket around the sample mean until the score changes sign.
pub fn profile_mu_mle(data: &[f64], sigma: f64, alpha: f64) -> Result<f64> {
    check_data(data)?;
    BnParams::new(0.0, sigma, alpha)?;
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let g = |mu: f64| {
        data.iter()
            .map(|&x| {
                let z = (x - mu) / sigma;
                z - alpha * (alpha * z).tanh()
            })
            .sum::<f64>()
    };
    let mut half = sigma * (1.0 + alpha.abs());
    for _ in 0..64 {
        let (lo, hi) = (mean - half, mean + half);
        if let Ok(bracket) = RootBracket::new(g, lo, hi) {
            return find_root(g, &bracket, 1e-13 * mean.abs().max(sigma));
        }
        half *= 2.0;
    }
    Err(Error::BracketCapExceeded(half))
}

fn fisher_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(FISHER_HERMITE_ORDER).expect("order within range"))
}

/// Per-observation Fisher information for `alpha` with `mu`, `sigma` known:
/// `I(alpha) = 1 - exp(-alpha²/2) E_Phi[Z² sech(alpha Z)]`.
///
/// Gauss-Hermite (order 256) up to `|alpha| = 3`. Beyond that the integrand's
/// poles at `±i pi / (2 alpha)` close in on the real axis and the rule loses
/// accuracy, so the equivalent form `1 - E[Z_X² sech²(alpha Z_X)]` is
/// integrated adaptively instead. Below `|alpha| = 1e-4` the series
/// `2 alpha² - 4 alpha⁴` is used.
pub fn fisher_info_alpha(alpha: f64) -> f64 {
    let a = alpha.abs();
    if a < 1e-4 {
        let a2 = a * a;
        return 2.0 * a2 - 4.0 * a2 * a2;
    }
    if a <= 3.0 {
        let e = expect_std_normal(|z| z * z / (a * z).cosh(), fisher_rule());
        return 1.0 - (-0.5 * a * a).exp() * e;
    }
    // Z_X is an equal mixture of N(±a, 1) and the integrand is even.
    let e = integrate_real_line(
        |z| {
            let c = (a * z).cosh();
            z * z / (c * c) * std_normal_pdf(z - a)
        },
        0.0,
        1.0,
        1e-15,
    )
    .expect("smooth Gaussian-weighted integrand");
    1.0 - e
}

/// Half-width `z_{(1 + level)/2} / sqrt(n I)` of the Wald interval.
pub fn ci_half_width(info: f64, n: usize, level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("level must lie in (0, 1), got {level}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let z = std_normal_quantile(0.5 * (1.0 + level))?;
    Ok(z / (n as f64 * info).sqrt())
}

/// Asymptotic interval `alpha_hat ± z / sqrt(n I(alpha_hat))`, intersected with
/// `[0, inf)`.
pub fn asymptotic_ci_alpha(alpha_hat: f64, n: usize, level: f64) -> Result<(f64, f64)> {
    let a = alpha_hat.abs();
    let info = fisher_info_alpha(a);
    if !(info > 0.0) {
        return Err(Error::ZeroInformation(alpha_hat));
    }
    let half = ci_half_width(info, n, level)?;
    Ok(((a - half).max(0.0), a + half))
}
