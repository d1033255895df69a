use thiserror::Error;

/// Errors raised by operators, estimators and the CLI layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("field `{field}` has no {norm} sup-norm")]
    MissingNorm { field: String, norm: &'static str },

    #[error("non-finite value {value} of `{field}` at ({x}, {y})")]
    NonFinite {
        field: String,
        x: f64,
        y: f64,
        value: f64,
    },

    #[error("unknown function `{name}`; available: {}", available.join(", "))]
    UnknownFunction {
        name: String,
        available: Vec<String>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
