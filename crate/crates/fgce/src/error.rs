use thiserror::Error;

/// Errors shared by every computational module in the crate.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("alpha must be a positive finite real, got {0}")]
    InvalidAlpha(f64),
    #[error("invalid support: lower {lower}, upper {upper}")]
    InvalidSupport { lower: f64, upper: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
    #[error("scale parameter must be strictly positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("integral does not converge")]
    DivergentIntegral,
    #[error("operation needs a density but the model does not provide one")]
    MissingPdf,
    #[error("operation needs a quantile function but the model does not provide one")]
    MissingQuantile,
    #[error("division by a vanishing quantity: {0}")]
    ZeroDenominator(&'static str),
    #[error("no probability mass in the requested region")]
    ZeroMass,
    #[error("outside the domain of validity: {0}")]
    OutOfDomain(String),
    #[error("operation requires a bounded support")]
    UnboundedSupport,
    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),
    #[error("sample is empty")]
    EmptySample,
    #[error("sample too small: need at least {need} observations, got {got}")]
    SampleTooSmall { need: usize, got: usize },
    #[error("base function g is not strictly monotone on the integration range")]
    NonMonotoneG,
    #[error("parse error: {0}")]
    ParseError(String),
}

pub type Result<T> = core::result::Result<T, Error>;
