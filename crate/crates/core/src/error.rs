use thiserror::Error;

/// Errors raised by the series, quadrature and field evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation overflow: cutoff {required} exceeds max_index {max_index}")]
    TruncationOverflow { required: u64, max_index: usize },

    #[error("position x = {x} outside the well [0, {l}]")]
    OutOfWell { x: f64, l: f64 },

    #[error("non-integrable sample at x = {x}")]
    NonIntegrable { x: f64 },

    #[error("non-finite stencil sample at x = {x}")]
    NonFiniteStencil { x: f64 },

    #[error("density below floor on stencil at x = {x}, t = {t}")]
    NodeUndefined { x: f64, t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
