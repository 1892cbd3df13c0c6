use crate::error::{Error, Result};
use crate::numerics::roots::{find_root, RootBracket};

/// `ln(sqrt(2 pi))`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Term cap for the ascending 1F1 series.
pub const KUMMER_MAX_TERMS: usize = 10_000;

/// Error function, `2/sqrt(pi) * int_0^x exp(-t²) dt`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)`, accurate in the upper tail.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `Phi(x) = (1 + erf(x / sqrt 2)) / 2`, evaluated through `erfc` so that the
/// lower tail keeps full relative precision.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail `1 - Phi(x)`.
pub fn std_normal_sf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 1.0;
    }
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`std_normal_cdf`] for `0 < q < 1`.
pub fn std_normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "probability must lie in (0, 1), got {q}"
        )));
    }
    if q == 0.5 {
        return Ok(0.0);
    }
    // Solve on whichever tail keeps the residual well conditioned.
    if q < 0.5 {
        let f = |x: f64| std_normal_cdf(x) - q;
        let bracket = RootBracket::new(f, -40.0, 0.0)?;
        find_root(f, &bracket, 1e-15)
    } else {
        let tail = 1.0 - q;
        let f = |x: f64| tail - std_normal_sf(x);
        let bracket = RootBracket::new(f, 0.0, 40.0)?;
        find_root(f, &bracket, 1e-15)
    }
}

/// Overflow-safe `ln cosh(t) = |t| + ln(1 + e^{-2|t|}) - ln 2`.
pub fn log_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `Gamma(k / 2)` for a positive integer `k`, exact up to rounding.
pub fn gamma_half_integer(k: u32) -> f64 {
    assert!(k > 0, "Gamma(0) is undefined");
    // Gamma(1) = 1, Gamma(1/2) = sqrt(pi), Gamma(x + 1) = x Gamma(x).
    let (mut value, mut x) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    while x < k as f64 / 2.0 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Kummer's confluent hypergeometric function `1F1(a; b; x)` by its ascending
/// series, with the term ratio `(a + k) x / ((b + k)(k + 1))`.
///
/// Summation stops once a term falls below `1e-16` times the partial sum, or
/// when the series terminates because `a` is a non-positive integer.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "1F1 arguments must be finite: a = {a}, b = {b}, x = {x}"
        )));
    }
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "1F1 is undefined for b = {b} (zero or negative integer)"
        )));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..KUMMER_MAX_TERMS {
        let k = k as f64;
        term *= (a + k) * x / ((b + k) * (k + 1.0));
        sum += term;
        if term == 0.0 || term.abs() < 1e-16 * sum.abs() {
            return Ok(sum);
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::SeriesDivergence {
        a,
        b,
        x,
        terms: KUMMER_MAX_TERMS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::adaptive_quad;

    #[test]
    fn erf_basic_values() {
        assert_eq!(erf(0.0), 0.0);
        for x in [0.3, 1.7] {
            assert_eq!(erf(x), -erf(-x));
        }
        let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
        let oracle = two_over_sqrt_pi * adaptive_quad(|t| (-t * t).exp(), 0.0, 1.0, 1e-15).unwrap();
        assert!((oracle - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((erf(1.0) - oracle).abs() <= 1e-14);
    }

    #[test]
    fn erf_matches_defining_integral_on_grid() {
        let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
        for i in 0..=60 {
            let x = -3.0 + 0.1 * i as f64;
            let oracle = two_over_sqrt_pi * adaptive_quad(|t| (-t * t).exp(), 0.0, x, 1e-15).unwrap();
            assert!((erf(x) - oracle).abs() <= 1e-14, "x = {x}");
        }
    }

    #[test]
    fn normal_pdf_cdf() {
        assert!((std_normal_pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-16);
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(2.0) - 0.977_249_868_051_820_8).abs() < 1e-15);
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
        assert_eq!(std_normal_cdf(f64::INFINITY), 1.0);
        for i in -50..50 {
            let x = i as f64 * 0.13;
            let alt = 0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2));
            assert!((std_normal_cdf(x) - alt).abs() < 1e-15);
            assert!((std_normal_cdf(x) + std_normal_sf(x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn normal_quantile_roundtrip() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        let z975 = std_normal_quantile(0.975).unwrap();
        assert!((z975 - 1.959_963_984_540_054).abs() < 1e-12);
        for q in [1e-10, 1e-4, 0.1, 0.3, 0.7, 0.99, 1.0 - 1e-9] {
            let x = std_normal_quantile(q).unwrap();
            let back = if q < 0.5 { std_normal_cdf(x) } else { 1.0 - std_normal_sf(x) };
            assert!(((back - q) / q.min(1.0 - q)).abs() < 1e-9, "q = {q}");
        }
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
    }

    #[test]
    fn log_cosh_is_stable() {
        for t in [-3.0, -0.2, 0.0, 0.5, 7.0] {
            let direct: f64 = f64::cosh(t).ln();
            assert!((log_cosh(t) - direct).abs() < 1e-14);
        }
        assert!((log_cosh(1600.0) - (1600.0 - std::f64::consts::LN_2)).abs() < 1e-12);
        assert!(log_cosh(-1e308).is_finite());
    }

    #[test]
    fn gamma_half_integers() {
        let pi = std::f64::consts::PI;
        assert_eq!(gamma_half_integer(2), 1.0);
        assert!((gamma_half_integer(1) - pi.sqrt()).abs() < 1e-15);
        assert!((gamma_half_integer(3) - 0.5 * pi.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half_integer(10), 24.0);
        assert!((gamma_half_integer(7) - 3.323_350_970_447_843).abs() < 1e-14);
    }

    #[test]
    fn kummer_known_cases() {
        for (a, b) in [(0.3, 1.2), (-2.5, 0.5), (4.0, 7.0)] {
            assert_eq!(kummer_1f1(a, b, 0.0).unwrap(), 1.0);
        }
        assert!((kummer_1f1(1.0, 1.0, 0.7).unwrap() - 0.7f64.exp()).abs() < 1e-15);
        assert!((kummer_1f1(-1.0, 0.5, -0.3).unwrap() - 1.6).abs() < 1e-15);
    }

    #[test]
    fn kummer_rejects_bad_b() {
        assert!(kummer_1f1(1.0, 0.0, 0.5).is_err());
        assert!(kummer_1f1(1.0, -3.0, 0.5).is_err());
        assert!(kummer_1f1(1.0, -2.5, 0.5).is_ok());
    }

    #[test]
    fn kummer_reports_non_convergence() {
        let err = kummer_1f1(0.5, 0.5, 50_000.0).unwrap_err();
        assert!(matches!(err, Error::SeriesDivergence { .. }));
    }
}
