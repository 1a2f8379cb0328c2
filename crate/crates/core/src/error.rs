use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// A block list or restricted growth string does not describe a partition.
    #[error("invalid partition: {reason}")]
    InvalidPartition { reason: String },

    /// Partition enumeration was requested past the configured ceiling.
    /// Counts grow like the Bell numbers, so this is a hard stop rather
    /// than a slow computation.
    #[error("enumerating partitions of {n} items exceeds the limit of {limit}")]
    EnumerationLimit { n: usize, limit: usize },

    /// A scalar argument is outside its domain.
    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },

    /// A marginal likelihood was requested for a cluster with no members.
    #[error("cluster statistics are empty")]
    EmptyCluster,

    /// Data violate the support of the uniform component prior.
    #[error("{count} observation(s) outside the uniform prior support [{lo}, {hi}]")]
    OutsideSupport { lo: f64, hi: f64, count: usize },

    /// The posterior mass at `s` clusters underflowed to zero, so the
    /// ratio to `s + 1` clusters has no finite representation.
    #[error("posterior probability of {s} clusters is zero; ratio undefined")]
    UndefinedRatio { s: usize },

    /// A block split request named a block or part size that does not exist.
    #[error("block {block} has no split with part size {size}")]
    InvalidSplit { block: usize, size: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid_partition(reason: impl Into<String>) -> Self {
        Error::InvalidPartition { reason: reason.into() }
    }

    pub(crate) fn invalid_parameter(reason: impl Into<String>) -> Self {
        Error::InvalidParameter { reason: reason.into() }
    }
}
