use thiserror::Error;

/// Errors produced by the arithmetic and analytic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sieve limit {0} is below 2, the table would be empty")]
    EmptyTable(u64),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "could not completely factor {n}: cofactor {cofactor} is composite beyond the sieve range"
    )]
    IncompleteFactorization { n: u64, cofactor: u64 },

    #[error("malformed character spec {spec:?}: {reason}")]
    Parse { spec: String, reason: String },

    #[error("numerical domain error: {0}")]
    Numerical(String),

    #[error("search failed: {0}")]
    SearchFailure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
