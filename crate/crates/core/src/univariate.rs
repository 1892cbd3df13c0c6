//! The univariate BN law: evaluation, summary quantities, modes and sampling.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    default_root_tol, erf, find_root, gamma_half_integer, integrate_real_line, kummer_1f1,
    log_cosh, std_normal_cdf, std_normal_pdf, std_normal_sf, RootBracket, LN_SQRT_2PI,
};

/// Largest moment order served by [`BnParams::raw_moment`].
pub const MAX_RAW_MOMENT: u32 = 12;

/// Lower end of the mode bracket, in standardized units; excludes the
/// critical point at `mu`.
const MODE_BRACKET_EPS: f64 = 1e-8;

/// Location `mu`, scale `sigma > 0` and bimodality parameter `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BnParams {
    pub mu: f64,
    pub sigma: f64,
    pub alpha: f64,
}

/// Equal-weight pair `N(loc_plus, scale²)`, `N(loc_minus, scale²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BnMixture {
    pub weight: f64,
    pub loc_plus: f64,
    pub loc_minus: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeKind {
    Unimodal,
    Bimodal,
}

/// Modes of the density, ascending, with the antimode between them when bimodal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub kind: ModeKind,
    pub modes: Vec<f64>,
    pub antimode: Option<f64>,
}

impl BnMixture {
    pub fn pdf(&self, x: f64) -> f64 {
        let s = self.scale;
        self.weight * std_normal_pdf((x - self.loc_plus) / s) / s
            + (1.0 - self.weight) * std_normal_pdf((x - self.loc_minus) / s) / s
    }
}

impl BnParams {
    pub fn new(mu: f64, sigma: f64, alpha: f64) -> Result<Self> {
        if !(mu.is_finite() && sigma.is_finite() && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "parameters must be finite: mu = {mu}, sigma = {sigma}, alpha = {alpha}"
            )));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { mu, sigma, alpha })
    }

    /// Same law with `alpha >= 0`; the density is even in `alpha`.
    pub fn canonical(self) -> Self {
        Self { alpha: self.alpha.abs(), ..self }
    }

    #[inline]
    pub fn standardize(&self, x: f64) -> f64 {
        (x - self.mu) / self.sigma
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// `-ln sigma - ln sqrt(2 pi) - z²/2 - alpha²/2 + ln cosh(alpha z)`.
    pub fn log_pdf(&self, x: f64) -> f64 {
        let z = self.standardize(x);
        -self.sigma.ln() - LN_SQRT_2PI - 0.5 * z * z - 0.5 * self.alpha * self.alpha
            + log_cosh(self.alpha * z)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        let z = self.standardize(x);
        0.5 * (std_normal_cdf(z - self.alpha) + std_normal_cdf(z + self.alpha))
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 1.0;
        }
        if x == f64::INFINITY {
            return 0.0;
        }
        let z = self.standardize(x);
        0.5 * (std_normal_sf(z - self.alpha) + std_normal_sf(z + self.alpha))
    }

    /// `pdf / (1 - cdf)`; fails once the survival function underflows.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        let s = self.survival(x);
        if !(s > 0.0) {
            return Err(Error::ZeroSurvival(x));
        }
        Ok(self.pdf(x) / s)
    }

    /// Inverse of [`cdf`](Self::cdf) for `0 < q < 1`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("quantile level must lie in (0, 1), got {q}")));
        }
        if q == 0.5 {
            return Ok(self.mu);
        }
        // Residual on the shorter tail to keep relative precision near 0 and 1.
        let residual = |x: f64| {
            if q < 0.5 {
                self.cdf(x) - q
            } else {
                (1.0 - q) - self.survival(x)
            }
        };
        let mut half_width = self.sigma * (self.alpha.abs() + 10.0);
        let bracket = loop {
            let lo = self.mu - half_width;
            let hi = self.mu + half_width;
            match RootBracket::new(residual, lo, hi) {
                Ok(b) => break b,
                Err(_) if half_width < self.sigma * 1e4 => half_width *= 2.0,
                Err(e) => return Err(e),
            }
        };
        let guess_scale = self.mu.abs() + half_width;
        find_root(residual, &bracket, default_root_tol(guess_scale) * 1e-2)
    }

    /// `n` draws of `mu + sigma (Z + A)` with `A = ±alpha` by a fair coin.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        let a = if rng.random::<bool>() { self.alpha } else { -self.alpha };
        self.mu + self.sigma * (z + a)
    }

    pub fn mixture(&self) -> BnMixture {
        BnMixture {
            weight: 0.5,
            loc_plus: self.mu + self.alpha * self.sigma,
            loc_minus: self.mu - self.alpha * self.sigma,
            scale: self.sigma,
        }
    }

    /// `exp(mu t + sigma² t² / 2) cosh(alpha sigma t)`.
    pub fn mgf(&self, t: f64) -> f64 {
        (self.mu * t + 0.5 * self.sigma * self.sigma * t * t).exp() * (self.alpha * self.sigma * t).cosh()
    }

    /// Characteristic function as `(re, im)`:
    /// `exp(-sigma² t² / 2) cos(alpha sigma t) (cos mu t, sin mu t)`.
    pub fn cf(&self, t: f64) -> (f64, f64) {
        let m = (-0.5 * self.sigma * self.sigma * t * t).exp() * (self.alpha * self.sigma * t).cos();
        let (s, c) = (self.mu * t).sin_cos();
        (m * c, m * s)
    }

    pub fn mean(&self) -> f64 {
        self.mu
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma * (1.0 + self.alpha * self.alpha)
    }

    pub fn skewness(&self) -> f64 {
        0.0
    }

    /// Mean absolute deviation about the mean,
    /// `[2 phi(alpha) + alpha erf(alpha / sqrt 2)] sigma`; even in `alpha`.
    pub fn mad(&self) -> f64 {
        let a = self.alpha;
        (2.0 * std_normal_pdf(a) + a * erf(a / std::f64::consts::SQRT_2)) * self.sigma
    }

    /// `E[((X - mu) / sqrt(Var X))^n]`.
    pub fn std_moment(&self, n: u32) -> f64 {
        if n % 2 == 1 {
            return 0.0;
        }
        let a = self.alpha;
        let mut sum = 0.0;
        let mut binom = 1.0; // C(n, k)
        let mut normal_moment = 1.0; // E[Z^k] = (k - 1)!!
        for k in 0..=n {
            if k % 2 == 0 {
                sum += binom * a.powi((n - k) as i32) * normal_moment;
                normal_moment *= (k + 1) as f64;
            }
            binom *= (n - k) as f64 / (k + 1) as f64;
        }
        sum / (1.0 + a * a).powf(n as f64 / 2.0)
    }

    /// `E[(X - mu)^4] / sigma^4 = alpha⁴ + 6 alpha² + 3`. This is not the
    /// variance-standardized kurtosis, which is `std_moment(4)`.
    pub fn fourth_central_over_sigma4(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        a2 * (a2 + 6.0) + 3.0
    }

    /// `E[X^n]` through Kummer's function, `0 <= n <= 12`.
    pub fn raw_moment(&self, n: u32) -> Result<f64> {
        if n > MAX_RAW_MOMENT {
            return Err(Error::InvalidParameter(format!(
                "raw moments are served for n <= {MAX_RAW_MOMENT}, got {n}"
            )));
        }
        if n == 0 {
            return Ok(1.0);
        }
        let s = self.sigma;
        let centers = [self.mu + self.alpha * s, self.mu - self.alpha * s];
        let nf = n as f64;
        let sqrt_pi = std::f64::consts::PI.sqrt();
        if n.is_multiple_of(2) {
            let coef = s.powi(n as i32) * 2f64.powf((nf - 2.0) / 2.0) * gamma_half_integer(n + 1) / sqrt_pi;
            let mut sum = 0.0;
            for c in centers {
                sum += kummer_1f1(-nf / 2.0, 0.5, -c * c / (2.0 * s * s))?;
            }
            Ok(coef * sum)
        } else {
            let coef = s.powi(n as i32 - 1) * 2f64.powf((nf - 1.0) / 2.0) * gamma_half_integer(n + 2) / sqrt_pi;
            let mut sum = 0.0;
            for c in centers {
                sum += c * kummer_1f1((1.0 - nf) / 2.0, 1.5, -c * c / (2.0 * s * s))?;
            }
            Ok(coef * sum)
        }
    }

    /// Shannon entropy `ln sqrt(2 pi sigma²) + (2 alpha² + 1)/2 - E[ln cosh(alpha Z_X)]`,
    /// where `Z_X = (X - mu)/sigma`; the expectation is integrated numerically.
    pub fn entropy(&self) -> f64 {
        let a = self.alpha.abs();
        let base = self.sigma.ln() + LN_SQRT_2PI + (2.0 * a * a + 1.0) / 2.0;
        if a == 0.0 {
            return base;
        }
        // Z_X is an equal mixture of N(±alpha, 1) and ln cosh is even, so one
        // component carries the whole expectation.
        let expected_log_cosh = integrate_real_line(|z| log_cosh(a * z) * std_normal_pdf(z - a), a, 1.0, 1e-14)
            .expect("smooth Gaussian-weighted integrand");
        base - expected_log_cosh
    }

    /// The closed form `ln sqrt(2 pi sigma²) + (2 alpha² + 1)/2 -
    /// exp(-alpha²/2) (exp(2 alpha²) + 1) / 2` as published. It does not agree
    /// with [`entropy`](Self::entropy), e.g. it gives 0.4189 instead of 1.4189
    /// for the standard normal; kept as a reference value.
    pub fn entropy_published(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        self.sigma.ln() + LN_SQRT_2PI + (2.0 * a2 + 1.0) / 2.0
            - 0.5 * (-a2 / 2.0).exp() * ((2.0 * a2).exp() + 1.0)
    }

    /// Critical points solve `x = mu + alpha sigma tanh(alpha (x - mu) / sigma)`.
    pub fn modes(&self) -> ModeSet {
        let a = self.alpha.abs();
        if a <= 1.0 {
            return ModeSet {
                kind: ModeKind::Unimodal,
                modes: vec![self.mu],
                antimode: None,
            };
        }
        let h = |z: f64| z - a * (a * z).tanh();
        let mut eps = MODE_BRACKET_EPS;
        while h(eps) >= 0.0 && eps > 1e-300 {
            eps *= 1e-4;
        }
        let bracket = RootBracket::new(h, eps, a).expect("h(eps) < 0 < h(|alpha|) for |alpha| > 1");
        let z0 = find_root(h, &bracket, default_root_tol(a) * 1e-2).expect("valid bracket");
        let delta = self.sigma * z0;
        ModeSet {
            kind: ModeKind::Bimodal,
            modes: vec![self.mu - delta, self.mu + delta],
            antimode: Some(self.mu),
        }
    }
}
