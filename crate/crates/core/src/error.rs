use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("points per axis must be even, got {0}")]
    OddGridSize(usize),

    #[error("points per axis {got} outside [{min}, {max}] for dimension {n}")]
    GridSizeOutOfRange { n: usize, got: usize, min: usize, max: usize },

    #[error("box length must be positive and finite, got {0}")]
    InvalidBoxLength(f64),

    #[error("field support radius {radius} exceeds the padding limit {limit}")]
    SupportOverflow { radius: f64, limit: f64 },

    #[error("field mean {mean:e} is not zero relative to its L1 norm {l1:e}")]
    MeanNotZero { mean: f64, l1: f64 },

    #[error("epsilon {eps} too small for box length {box_len}: Gaussian tail {tail:e} at the box edge")]
    EpsilonTooSmallForBox { eps: f64, box_len: f64, tail: f64 },

    #[error("exponent q = {q} outside [1, {critical}) (enable probe mode for critical experiments)")]
    QOutOfRange { q: f64, critical: f64 },

    #[error("integrand has sphere mean {0:e}; use the necessity probe instead")]
    SphereMeanNonzero(f64),

    #[error("field is not divergence free (relative divergence {0:e})")]
    NotDivergenceFree(f64),

    #[error("radius {radius} outside (0, {max})")]
    RadiusOutOfRange { radius: f64, max: f64 },

    #[error("argument {arg} outside the domain of {func}")]
    Domain { func: &'static str, arg: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("ladder needs at least {min} entries, got {got}")]
    LadderTooShort { min: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
