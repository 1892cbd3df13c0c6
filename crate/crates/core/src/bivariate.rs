//! The bivariate BN (BBN) law.
//!
//! With `z1 = (x1 - mu1)/sigma1`, `z2 = (x2 - mu2)/sigma2` and `phi2` the
//! standard bivariate normal density with correlation `rho`,
//!
//! ```text
//! f(x1, x2) = exp(alpha² (rho² - 2) / 2) / (sigma1 sigma2)
//!             * phi2(z1, z2; rho) * cosh(alpha z1 + alpha (1 - rho) z2)
//! ```
//!
//! Completing the square shows this is an equal mixture of two correlated
//! normals with standardized means `±(alpha (1 + rho - rho²), alpha)`. Every
//! closed form below follows from that representation. Where the published
//! formulas differ, they are kept under `*_published` names for comparison.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::log_cosh;
use crate::univariate::BnParams;

/// Relative tolerance of the check [`BbnParams::mixture2`] runs against [`BbnParams::pdf2`].
pub const MIXTURE_GATE_RTOL: f64 = 1e-12;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbnParams {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub alpha: f64,
    pub rho: f64,
}

/// Two-component representation of a BBN law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BbnMixture {
    pub weight: f64,
    /// Standardized shift of the first coordinate, `alpha (1 + rho - rho²)`.
    pub shift1: f64,
    /// Standardized shift of the second coordinate, `alpha`.
    pub shift2: f64,
    pub rho: f64,
    pub mean_plus: [f64; 2],
    pub mean_minus: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl BbnMixture {
    pub fn pdf(&self, x1: f64, x2: f64) -> f64 {
        let s1 = self.cov[0][0].sqrt();
        let s2 = self.cov[1][1].sqrt();
        let comp = |m: [f64; 2]| (log_phi2((x1 - m[0]) / s1, (x2 - m[1]) / s2, self.rho) - (s1 * s2).ln()).exp();
        self.weight * comp(self.mean_plus) + (1.0 - self.weight) * comp(self.mean_minus)
    }
}

fn log_phi2(z1: f64, z2: f64, rho: f64) -> f64 {
    let one_m = 1.0 - rho * rho;
    -LN_2PI - 0.5 * one_m.ln() - (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / (2.0 * one_m)
}

impl BbnParams {
    pub fn new(mu1: f64, mu2: f64, sigma1: f64, sigma2: f64, alpha: f64, rho: f64) -> Result<Self> {
        let all = [mu1, mu2, sigma1, sigma2, alpha, rho];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite bivariate parameter in {all:?}")));
        }
        if !(sigma1 > 0.0 && sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!("scales must be positive, got {sigma1}, {sigma2}")));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("rho must lie in (-1, 1), got {rho}")));
        }
        Ok(Self { mu1, mu2, sigma1, sigma2, alpha, rho })
    }

    fn standardize(&self, x1: f64, x2: f64) -> (f64, f64) {
        ((x1 - self.mu1) / self.sigma1, (x2 - self.mu2) / self.sigma2)
    }

    pub fn shift1(&self) -> f64 {
        self.alpha * (1.0 + self.rho - self.rho * self.rho)
    }

    pub fn log_pdf2(&self, x1: f64, x2: f64) -> f64 {
        let (z1, z2) = self.standardize(x1, x2);
        let (a, r) = (self.alpha, self.rho);
        0.5 * a * a * (r * r - 2.0) - (self.sigma1 * self.sigma2).ln()
            + log_phi2(z1, z2, r)
            + log_cosh(a * z1 + a * (1.0 - r) * z2)
    }

    pub fn pdf2(&self, x1: f64, x2: f64) -> f64 {
        self.log_pdf2(x1, x2).exp()
    }

    /// Law of `X1`: `BN(mu1, sigma1, alpha (1 + rho - rho²))`.
    pub fn marginal_x1(&self) -> BnParams {
        BnParams { mu: self.mu1, sigma: self.sigma1, alpha: self.shift1() }
    }

    /// Law of `X2`: `BN(mu2, sigma2, alpha)`.
    pub fn marginal_x2(&self) -> BnParams {
        BnParams { mu: self.mu2, sigma: self.sigma2, alpha: self.alpha }
    }

    /// The published `X1` marginal `BN(mu1, sigma1, alpha)`, correct only for `rho = 0`.
    pub fn marginal_x1_published(&self) -> BnParams {
        BnParams { mu: self.mu1, sigma: self.sigma1, alpha: self.alpha }
    }

    /// `E[X1 | X2 = x2] = mu1 + sigma1 [rho z2 + alpha (1 - rho²) tanh(alpha z2)]`.
    pub fn conditional_mean_x1_given_x2(&self, x2: f64) -> f64 {
        let z2 = (x2 - self.mu2) / self.sigma2;
        let (a, r) = (self.alpha, self.rho);
        self.mu1 + self.sigma1 * (r * z2 + a * (1.0 - r * r) * (a * z2).tanh())
    }

    /// Published conditional mean, without the leading `alpha` on the tanh term.
    pub fn conditional_mean_x1_given_x2_published(&self, x2: f64) -> f64 {
        let z2 = (x2 - self.mu2) / self.sigma2;
        let (a, r) = (self.alpha, self.rho);
        self.mu1 + self.sigma1 * (r * z2 + (1.0 - r * r) * (a * z2).tanh())
    }

    /// `Cov(X1, X2) = sigma1 sigma2 [rho + alpha² (1 + rho - rho²)]`.
    pub fn covariance(&self) -> f64 {
        self.sigma1 * self.sigma2 * (self.rho + self.alpha * self.shift1())
    }

    /// Published covariance `sigma1 sigma2 [rho (1 + alpha²) + (1 - rho²) alpha]`.
    pub fn covariance_published(&self) -> f64 {
        let (a, r) = (self.alpha, self.rho);
        self.sigma1 * self.sigma2 * (r * (1.0 + a * a) + (1.0 - r * r) * a)
    }

    pub fn covariance_matrix(&self) -> [[f64; 2]; 2] {
        let c = self.covariance();
        [[self.marginal_x1().variance(), c], [c, self.marginal_x2().variance()]]
    }

    pub fn correlation(&self) -> f64 {
        let m = self.covariance_matrix();
        m[0][1] / (m[0][0] * m[1][1]).sqrt()
    }

    /// Published covariance divided by the published variances `sigma_i² (1 + alpha²)`.
    pub fn correlation_published(&self) -> f64 {
        self.covariance_published() / (self.sigma1 * self.sigma2 * (1.0 + self.alpha * self.alpha))
    }

    fn mixture_unchecked(&self) -> BbnMixture {
        let (s1, s2) = (self.shift1(), self.alpha);
        let r = self.rho;
        BbnMixture {
            weight: 0.5,
            shift1: s1,
            shift2: s2,
            rho: r,
            mean_plus: [self.mu1 + self.sigma1 * s1, self.mu2 + self.sigma2 * s2],
            mean_minus: [self.mu1 - self.sigma1 * s1, self.mu2 - self.sigma2 * s2],
            cov: [
                [self.sigma1 * self.sigma1, r * self.sigma1 * self.sigma2],
                [r * self.sigma1 * self.sigma2, self.sigma2 * self.sigma2],
            ],
        }
    }

    /// Mixture representation, checked against [`pdf2`](Self::pdf2) on a 9x9
    /// grid spanning both components before it is returned.
    pub fn mixture2(&self) -> Result<BbnMixture> {
        let m = self.mixture_unchecked();
        let reach1 = self.sigma1 * (m.shift1.abs() + 3.0);
        let reach2 = self.sigma2 * (m.shift2.abs() + 3.0);
        let mut worst = 0.0f64;
        for i in 0..9 {
            for j in 0..9 {
                let x1 = self.mu1 + reach1 * (i as f64 / 4.0 - 1.0);
                let x2 = self.mu2 + reach2 * (j as f64 / 4.0 - 1.0);
                let direct = self.pdf2(x1, x2);
                if direct > 0.0 {
                    worst = worst.max((m.pdf(x1, x2) - direct).abs() / direct);
                }
            }
        }
        if worst > MIXTURE_GATE_RTOL {
            return Err(Error::MixtureMismatch(worst));
        }
        Ok(m)
    }

    /// Draws `n` pairs: a fair coin picks the component, then a correlated normal
    /// pair is shifted by that component's mean.
    pub fn sample2<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<(f64, f64)>> {
        let m = self.mixture2()?;
        let c = (1.0 - self.rho * self.rho).sqrt();
        Ok((0..n)
            .map(|_| {
                let mean = if rng.random::<bool>() { m.mean_plus } else { m.mean_minus };
                let e1: f64 = rng.sample(StandardNormal);
                let e2: f64 = rng.sample(StandardNormal);
                (mean[0] + self.sigma1 * e1, mean[1] + self.sigma2 * (self.rho * e1 + c * e2))
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_real_line;
    use crate::rng;
    use crate::stats;

    fn bbn(alpha: f64, rho: f64) -> BbnParams {
        BbnParams::new(0.0, 0.0, 1.0, 1.0, alpha, rho).unwrap()
    }

    fn int_x1(p: &BbnParams, g: impl Fn(f64) -> f64) -> f64 {
        let reach = p.sigma1 * (1.0 + p.shift1().abs());
        integrate_real_line(g, p.mu1, reach, 1e-13).unwrap()
    }

    fn int_x2(p: &BbnParams, g: impl Fn(f64) -> f64) -> f64 {
        let reach = p.sigma2 * (1.0 + p.alpha.abs());
        integrate_real_line(g, p.mu2, reach, 1e-13).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BbnParams::new(0.0, 0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(BbnParams::new(0.0, 0.0, 0.0, 1.0, 1.0, 0.2).is_err());
        assert!(BbnParams::new(f64::NAN, 0.0, 1.0, 1.0, 1.0, 0.2).is_err());
    }

    #[test]
    fn alpha_zero_is_bivariate_normal() {
        let p = BbnParams::new(1.0, -0.5, 2.0, 0.5, 0.0, 0.3).unwrap();
        for i in -5..=5 {
            for j in -5..=5 {
                let (x1, x2) = (1.0 + 0.7 * i as f64, -0.5 + 0.2 * j as f64);
                let z1 = (x1 - 1.0) / 2.0;
                let z2 = (x2 + 0.5) / 0.5;
                let q = (z1 * z1 - 0.6 * z1 * z2 + z2 * z2) / (1.0 - 0.09);
                let oracle = (-q / 2.0).exp() / (2.0 * std::f64::consts::PI * 2.0 * 0.5 * (1.0 - 0.09f64).sqrt());
                assert!((p.pdf2(x1, x2) - oracle).abs() <= 1e-15 * oracle.max(1e-300) + 1e-300);
            }
        }
        let m = p.mixture2().unwrap();
        assert_eq!(m.mean_plus, m.mean_minus);
    }

    #[test]
    fn normalization_by_nested_quadrature() {
        for (a, r) in [(2.0, 0.5), (1.0, -0.7)] {
            let p = bbn(a, r);
            let total = int_x2(&p, |x2| int_x1(&p, |x1| p.pdf2(x1, x2)));
            assert!((total - 1.0).abs() < 1e-8, "(alpha, rho) = ({a}, {r}): {total}");
        }
    }

    #[test]
    fn point_symmetry() {
        let p = BbnParams::new(0.3, -1.0, 1.5, 0.7, 1.8, -0.4).unwrap();
        for (x1, x2) in [(0.0, 0.0), (2.1, -3.0), (-1.0, 0.5)] {
            let a = p.pdf2(x1, x2);
            let b = p.pdf2(2.0 * p.mu1 - x1, 2.0 * p.mu2 - x2);
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }

    #[test]
    fn marginals_match_quadrature() {
        let p = bbn(2.0, 0.5);
        assert!((p.marginal_x1().alpha - 2.5).abs() < 1e-15);
        let (m1, m2) = (p.marginal_x1(), p.marginal_x2());
        let mut published_gap = 0.0f64;
        for k in 0..=200 {
            let x = -8.0 + 0.08 * k as f64;
            let q1 = int_x2(&p, |x2| p.pdf2(x, x2));
            let q2 = int_x1(&p, |x1| p.pdf2(x1, x));
            assert!((q1 - m1.pdf(x)).abs() < 1e-8, "x1 marginal at {x}");
            assert!((q2 - m2.pdf(x)).abs() < 1e-8, "x2 marginal at {x}");
            published_gap = published_gap.max((q1 - p.marginal_x1_published().pdf(x)).abs());
        }
        assert!(published_gap > 1e-2);
        let independent = bbn(2.0, 0.0);
        assert_eq!(independent.marginal_x1(), independent.marginal_x1_published());
    }

    #[test]
    fn conditional_mean_matches_quadrature() {
        let p = bbn(2.0, 0.5);
        assert!((p.conditional_mean_x1_given_x2(1.0) - (0.5 + 1.5 * 2.0f64.tanh())).abs() < 1e-15);
        for k in 0..=10 {
            let x2 = -2.5 + 0.5 * k as f64;
            let num = int_x1(&p, |x1| x1 * p.pdf2(x1, x2));
            let den = int_x1(&p, |x1| p.pdf2(x1, x2));
            assert!((num / den - p.conditional_mean_x1_given_x2(x2)).abs() < 1e-8, "x2 = {x2}");
        }
        let q = BbnParams::new(1.0, 2.0, 1.0, 3.0, 0.0, 0.4).unwrap();
        assert!((q.conditional_mean_x1_given_x2(5.0) - (1.0 + 0.4)).abs() < 1e-15);
        assert_eq!(q.conditional_mean_x1_given_x2(2.0), 1.0);
    }

    #[test]
    fn covariance_matches_quadrature() {
        for (a, r) in [(2.0, 0.0), (2.0, 0.5), (1.0, -0.7)] {
            let p = bbn(a, r);
            let q = int_x2(&p, |x2| x2 * int_x1(&p, |x1| x1 * p.pdf2(x1, x2)));
            assert!((q - p.covariance()).abs() < 1e-6, "({a}, {r}): {q} vs {}", p.covariance());
        }
        let p = bbn(2.0, 0.0);
        assert_eq!(p.covariance(), 4.0);
        assert_eq!(p.covariance_published(), 2.0);
        let q = BbnParams::new(0.0, 0.0, 2.0, 3.0, 0.0, -0.3).unwrap();
        assert!((q.covariance() - (-1.8)).abs() < 1e-15);
        assert!((q.correlation() + 0.3).abs() < 1e-15);
        assert!((q.covariance_published() - q.covariance()).abs() < 1e-15);
    }

    #[test]
    fn total_expectation() {
        let p = bbn(1.5, 0.3);
        let lhs = int_x2(&p, |x2| x2 * p.conditional_mean_x1_given_x2(x2) * p.marginal_x2().pdf(x2));
        let rhs = int_x2(&p, |x2| x2 * int_x1(&p, |x1| x1 * p.pdf2(x1, x2)));
        assert!((lhs - rhs).abs() < 1e-6);
    }

    #[test]
    fn independence_when_uncorrelated_normal() {
        let p = bbn(0.0, 0.0);
        assert_eq!(p.covariance(), 0.0);
        for (x1, x2) in [(0.0, 0.0), (1.0, -2.0), (2.5, 0.3)] {
            let prod = p.marginal_x1().pdf(x1) * p.marginal_x2().pdf(x2);
            assert!((p.pdf2(x1, x2) - prod).abs() < 1e-15);
        }
    }

    #[test]
    fn correlation_stays_in_range() {
        for i in 0..=40 {
            for j in 0..=38 {
                let a = -6.0 + 0.3 * i as f64;
                let r = -0.95 + 0.05 * j as f64;
                let c = bbn(a, r).correlation();
                assert!((-1.0..=1.0).contains(&c), "({a}, {r}) -> {c}");
            }
        }
    }

    #[test]
    fn mixture_matches_density_on_grid() {
        let p = BbnParams::new(0.5, -1.0, 1.3, 0.8, 2.0, 0.5).unwrap();
        let m = p.mixture2().unwrap();
        let mut worst = 0.0f64;
        for i in 0..41 {
            for j in 0..41 {
                let x1 = 0.5 + 1.3 * (-6.0 + 0.3 * i as f64);
                let x2 = -1.0 + 0.8 * (-6.0 + 0.3 * j as f64);
                worst = worst.max((m.pdf(x1, x2) - p.pdf2(x1, x2)).abs());
            }
        }
        assert!(worst <= 1e-12, "{worst}");
    }

    #[test]
    fn sample_covariance_matches() {
        let p = bbn(2.0, 0.5);
        let draws = p.sample2(&mut rng::from_seed(31), 200_000).unwrap();
        let (x1, x2): (Vec<f64>, Vec<f64>) = draws.into_iter().unzip();
        let (m1, m2) = (stats::mean(&x1), stats::mean(&x2));
        let prods: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| (a - m1) * (b - m2)).collect();
        let cov = stats::covariance(&x1, &x2);
        assert!((cov - p.covariance()).abs() < 4.0 * stats::std_error(&prods));
        assert!((stats::variance(&x1) - p.covariance_matrix()[0][0]).abs() < 0.1);
    }
}
