use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zeta has a pole at s = 1")]
    PoleAtOne,

    #[error("argument {re} + {im}i is outside the supported region")]
    RangeUnsupported { re: f64, im: f64 },

    #[error(
        "Euler-Maclaurin summation needs more than {max_terms} direct terms at s = {re} + {im}i"
    )]
    TermBudgetExceeded { re: f64, im: f64, max_terms: usize },

    #[error("classical zero ordinate {computed} disagrees with reference value {reference}")]
    ReferenceMismatch { computed: f64, reference: f64 },

    #[error("degenerate denominator in series factor j = {j}")]
    DegenerateDenominator { j: usize },

    #[error("series evaluation produced a non-finite value at k = {re} + {im}i")]
    NonFiniteResult { re: f64, im: f64 },

    #[error("zeta_plus' vanishes at 1/2 + {y}i; not a simple zero ordinate")]
    DerivativeNearZero { y: f64 },

    #[error("function vanishes on the contour at {re} + {im}i")]
    ZeroOnContour { re: f64, im: f64 },

    #[error("error estimate needs at least two accepted zero estimates")]
    InsufficientHistory,

    #[error("search for zero {index} (y = {y}) failed in every variant")]
    SearchFailed { index: usize, y: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
