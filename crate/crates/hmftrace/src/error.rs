use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("unsupported degree {0}; only quadratic fields are implemented")]
    UnsupportedDegree(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("quadrature did not converge in {what} (error estimate {estimate:.3e})")]
    Quadrature { what: String, estimate: f64 },
    #[error("pole: {0}")]
    Pole(String),
    #[error("insufficient accuracy: {0}")]
    Accuracy(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("ambiguous classification: {0}")]
    AmbiguousClassification(String),
    #[error("degenerate angle: {0}")]
    DegenerateAngle(String),
    #[error("integral does not converge: {0}")]
    NonIntegrable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidField(_) => "invalid_field",
            Error::UnsupportedDegree(_) => "unsupported_degree",
            Error::Domain(_) => "domain",
            Error::Inconsistency(_) => "inconsistency",
            Error::Quadrature { .. } => "quadrature",
            Error::Pole(_) => "pole",
            Error::Accuracy(_) => "accuracy",
            Error::Resource(_) => "resource",
            Error::AmbiguousClassification(_) => "ambiguous_classification",
            Error::DegenerateAngle(_) => "degenerate_angle",
            Error::NonIntegrable(_) => "non_integrable",
            Error::Unsupported(_) => "unsupported",
            Error::Config { .. } => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
