use thiserror::Error;

/// Errors raised by the allocation, scheduling and verification routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("instance is not identical-order: {0}")]
    NotIdo(String),

    #[error("index out of range: {what} {index} (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("allocation is incomplete: {0} chores unallocated")]
    Incomplete(usize),

    #[error("FFD does not allocate every chore at the upper bound {0}")]
    UpperBoundFails(u64),

    /// An invariant that the underlying theory guarantees did not hold.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
