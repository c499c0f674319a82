//! Error taxonomy shared across the crate.
//!
//! Configuration problems (`InvalidSpec`, `Io`, `Json`) are distinguished
//! from numerical-domain failures (truncation, conditioning, degenerate
//! normalization, range guards) so the CLI can map them to separate exit
//! codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cutoff mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("measurement outcome {outcome} exceeds mode cutoff {cutoff}")]
    OutcomeOutOfRange { outcome: usize, cutoff: usize },

    #[error("truncation tolerance violated: tail mass {tail_mass:.3e} > {tolerance:.3e}")]
    Truncation { tail_mass: f64, tolerance: f64 },

    #[error("parameter out of supported range: {0}")]
    Range(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("closed form ill-conditioned: {0}")]
    Conditioning(String),

    #[error("moment undefined: {0}")]
    UndefinedMoment(String),

    #[error("state not normalized: squared norm {norm_sqr}")]
    Normalization { norm_sqr: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad configuration rather than by the
    /// numerics of a well-formed request.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_) | Error::Io(_) | Error::Json(_)
        )
    }
}
