//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A symbol, parameter or distribution lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    /// The channel/input pair has no closed-form output marginal.
    #[error("unsupported composition: {0}")]
    UnsupportedComposition(String),

    #[error("mutual information is infinite or undefined: {0}")]
    InfiniteMutualInformation(String),

    /// A Monte Carlo estimator produced a non-finite value.
    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("codebook size exp({log_size:.3}) exceeds the configured maximum {cap}")]
    CodebookTooLarge { log_size: f64, cap: usize },

    #[error("exact enumeration over {size} output blocks exceeds the cap {cap}; use the Monte Carlo estimator")]
    EnumerationTooLarge { size: f64, cap: usize },

    /// Codebook-induced output puts mass where the target has none.
    #[error("induced output is not absolutely continuous w.r.t. the target: {0}")]
    AbsoluteContinuity(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("no valid parameters: {0}")]
    NoValidParams(String),

    #[error("degenerate dispersion: V = {0}")]
    DegenerateDispersion(f64),

    #[error("continuous input alphabet needs an input quantizer")]
    RequiresInputQuantizer,

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
