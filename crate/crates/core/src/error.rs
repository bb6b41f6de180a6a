use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("matrix is not Hermitian (residual {residual:e} > {tolerance:e})")]
    NotHermitian { residual: f64, tolerance: f64 },

    /// The requested construction would need more memory than is reasonable.
    #[error("{what}: {n_env} environment spins exceeds the limit of {limit}")]
    Resource {
        what: &'static str,
        n_env: usize,
        limit: usize,
    },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Self {
        Error::Shape {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
