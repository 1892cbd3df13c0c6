//! Special functions, quadrature and root finding shared by every other module.
//!
//! Everything here is a pure function of its inputs. The adaptive quadrature
//! routine doubles as the brute-force oracle used to check closed forms in tests.

mod quadrature;
mod roots;
mod special;

pub use quadrature::{
    adaptive_quad, expect_std_normal, gauss_hermite, integrate_real_line, QuadratureRule,
    DEFAULT_HERMITE_ORDER, MAX_HERMITE_ORDER,
};
pub use roots::{default_root_tol, find_root, RootBracket};
pub use special::{
    erf, erfc, gamma_half_integer, kummer_1f1, log_cosh, std_normal_cdf, std_normal_pdf,
    std_normal_quantile, std_normal_sf, KUMMER_MAX_TERMS, LN_SQRT_2PI,
};
