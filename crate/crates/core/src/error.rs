use thiserror::Error;

/// Errors raised anywhere in the engine.
///
/// `Verification` is reserved for broken exact identities (internal bugs or
/// inconsistent inputs); it always names where the check lives.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("state error: {0}")]
    State(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numeric error: {detail} (achieved {achieved:e})")]
    Numeric { detail: String, achieved: f64 },

    #[error("singular flow at order n={n}, p={p}: {detail}")]
    SingularFlow { n: usize, p: usize, detail: String },

    #[error("verification failure in {module}::{operation} at order {order}: {detail}")]
    Verification {
        module: &'static str,
        operation: &'static str,
        order: usize,
        detail: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn verification(
        module: &'static str,
        operation: &'static str,
        order: usize,
        detail: impl Into<String>,
    ) -> Self {
        Error::Verification {
            module,
            operation,
            order,
            detail: detail.into(),
        }
    }
}
