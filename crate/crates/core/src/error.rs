use thiserror::Error;

/// Errors raised by the construction and certification pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs are structurally incompatible (dimension mismatch, empty set where
    /// a metric is undefined, witness tables indexed differently from the
    /// correspondence).
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated hypothesis of an operation does not hold on the instance.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A table claims a property its own entries contradict.
    #[error("inconsistent instance: {0}")]
    Inconsistency(String),

    /// A constructed object failed its own certification.
    #[error("construction failed: {0}")]
    Construction(String),

    /// No object passing certification was found.
    #[error("no certificate: {reason} (best residual {best:e})")]
    NoCertificate { reason: String, best: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
