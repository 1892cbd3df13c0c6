use crate::error::{Error, Result};

/// A sign-changing interval for a scalar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    /// Evaluates `f` at both ends and checks `lo < hi`, `f(lo) f(hi) <= 0`.
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        Self::from_values(lo, hi, f(lo), f(hi))
    }

    pub fn from_values(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        let bracket = Self { lo, hi, f_lo, f_hi };
        if bracket.is_valid() {
            Ok(bracket)
        } else {
            Err(Error::InvalidBracket { lo, hi, f_lo, f_hi })
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lo < self.hi
            && self.lo.is_finite()
            && self.hi.is_finite()
            && !self.f_lo.is_nan()
            && !self.f_hi.is_nan()
            && (self.f_lo == 0.0 || self.f_hi == 0.0 || self.f_lo.signum() != self.f_hi.signum())
    }
}

/// Bracket-width target `1e-12 * max(1, |x|)` used for quantiles and modes.
pub fn default_root_tol(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

/// Brent's method: inverse quadratic / secant steps, falling back to bisection
/// whenever an interpolated step leaves the bracket or converges too slowly.
/// Returns once the bracket is no wider than `tol` (or an exact zero is hit).
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: &RootBracket, tol: f64) -> Result<f64> {
    if !bracket.is_valid() {
        return Err(Error::InvalidBracket {
            lo: bracket.lo,
            hi: bracket.hi,
            f_lo: bracket.f_lo,
            f_hi: bracket.f_hi,
        });
    }
    if bracket.f_lo == 0.0 {
        return Ok(bracket.lo);
    }
    if bracket.f_hi == 0.0 {
        return Ok(bracket.hi);
    }
    let tol = tol.max(0.0);
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (bracket.f_lo, bracket.f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Fixed-point iteration of x <- 2 tanh(2x) started at 2; independent of Brent.
    fn tanh_fixed_point() -> f64 {
        let mut x: f64 = 2.0;
        for _ in 0..10_000 {
            x = 2.0 * (2.0 * x).tanh();
        }
        x
    }

    #[test]
    fn affine_root() {
        let f = |x: f64| x - 1.0;
        let b = RootBracket::new(f, 0.0, 2.0).unwrap();
        assert!((find_root(f, &b, 1e-14).unwrap() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn tanh_root_agrees_with_fixed_point() {
        let oracle = tanh_fixed_point();
        assert!((oracle - 1.998_651_346_030_216).abs() < 1e-13);
        let f = |x: f64| 2.0 * (2.0 * x).tanh() - x;
        let b = RootBracket::new(f, 0.5, 2.5).unwrap();
        let root = find_root(f, &b, 1e-13).unwrap();
        assert!((root - oracle).abs() < 1e-12);
    }

    #[test]
    fn cubic_root_at_zero() {
        let f = |x: f64| x * x * x;
        let b = RootBracket::new(f, -1.0, 2.0).unwrap();
        let root = find_root(f, &b, 1e-10).unwrap();
        assert!(root.abs() <= 1e-10);
    }

    #[test]
    fn rejects_invalid_brackets() {
        let f = |x: f64| x * x + 1.0;
        assert!(matches!(RootBracket::new(f, -1.0, 1.0), Err(Error::InvalidBracket { .. })));
        assert!(RootBracket::new(|x| x, 1.0, -1.0).is_err());
        let bogus = RootBracket { lo: 0.0, hi: 1.0, f_lo: 1.0, f_hi: 2.0 };
        assert!(find_root(|x| x, &bogus, 1e-12).is_err());
    }

    #[test]
    fn endpoint_roots_are_returned() {
        let f = |x: f64| x - 3.0;
        let b = RootBracket::new(f, 3.0, 5.0).unwrap();
        assert_eq!(find_root(f, &b, 1e-12).unwrap(), 3.0);
    }

    proptest! {
        #[test]
        fn exact_on_affine_functions(slope in prop_oneof![-50.0..-0.01f64, 0.01..50.0f64], root in -100.0..100.0f64) {
            let f = |x: f64| slope * (x - root);
            let b = RootBracket::new(f, root - 7.3, root + 11.1).unwrap();
            let tol = default_root_tol(root);
            let x = find_root(f, &b, tol).unwrap();
            prop_assert!((x - root).abs() <= tol);
        }
    }
}
