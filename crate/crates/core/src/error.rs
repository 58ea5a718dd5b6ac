use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{op}: constant term must be {expected}, found {found}")]
    ConstantTerm {
        op: &'static str,
        expected: &'static str,
        found: String,
    },
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("degenerate iterate: det(A^{n} - I) = 0")]
    DegenerateIterate { n: u64 },
    #[error("no closed form with denominator degree <= {max_den_degree} (radical candidates {candidates:?})")]
    ReconstructionFailed {
        max_den_degree: usize,
        candidates: Vec<u32>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("parse error: {0}")]
    Parse(String),
}
