use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid root bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("series for 1F1({a}, {b}, {x}) did not converge within {terms} terms; reduce |x|")]
    SeriesDivergence { a: f64, b: f64, x: f64, terms: usize },

    #[error("adaptive quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    QuadratureTolerance { tol: f64, estimate: f64 },

    #[error("hazard undefined at x = {0}: survival is numerically zero")]
    ZeroSurvival(f64),

    #[error("no sign change found for the root search within |value| <= {0}")]
    BracketCapExceeded(f64),

    #[error("Fisher information is numerically zero at alpha = {0}; the interval degenerates at the alpha = 0 boundary")]
    ZeroInformation(f64),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("empty data")]
    EmptyData,

    #[error("mixture representation disagrees with the density by {0:e}")]
    MixtureMismatch(f64),
}
