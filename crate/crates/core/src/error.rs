use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("not a permutation of 1..={degree}: {reason}")]
    InvalidPermutation { degree: usize, reason: String },

    #[error("duplicate entry at position {position}")]
    DuplicateEntry { position: usize },

    #[error("invalid wreath element: {0}")]
    InvalidWreath(String),

    #[error("signed representation needs block size 2, got k={0}")]
    NotHyperoctahedral(usize),

    #[error("{what} has {required} elements, above the enumeration cap {cap} (raise it with --cap)")]
    CapExceeded {
        what: String,
        required: u128,
        cap: u128,
    },

    #[error("moment identity violated for (n, k) = ({n}, {k}): {detail}")]
    IdentityViolation { n: usize, k: usize, detail: String },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
