use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into two families: input validation (bad parameters,
/// mismatched dimensions, hypotheses that fail their sampled checks) and
/// numerical aborts (non-finite integrand values). The CLI maps the first
/// family to exit code 2 and the second to exit code 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("body family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("no closed form available for {0}")]
    NoClosedForm(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("cannot parse descriptor `{input}`: {reason}")]
    Descriptor { input: String, reason: String },

    #[error("non-finite integrand value {value} at sample {index}")]
    NonFinite { value: f64, index: u64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn descriptor(input: &str, reason: impl Into<String>) -> Self {
        Error::Descriptor {
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    /// True for numerical aborts, false for input validation failures.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
