use crate::dataset::PartitionViolation;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty point set has no centroid")]
    EmptyPointSet,

    #[error("point index {index} out of bounds for dataset of {len} points")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("duplicate point index {0} in subset")]
    DuplicateIndex(usize),

    #[error("invalid partition: {}", format_violations(.0))]
    InvalidPartition(Vec<PartitionViolation>),

    #[error("cluster index {cluster} out of range for k = {k}")]
    ClusterOutOfRange { cluster: usize, k: usize },

    #[error("lambda must lie in (0, 1], got {0}")]
    LambdaOutOfRange(f64),

    #[error("Γ⁺⁺ subset must lie within one cluster")]
    SubsetNotInCluster,

    #[error("instance too large for ideal oracle: {partitions} partitions exceed budget {budget}")]
    EnumerationBudget { partitions: u128, budget: u128 },

    #[error("axis must be non-zero")]
    ZeroAxis,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("inconsistent alternative split: {0}")]
    InconsistentSplit(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed dataset file: {0}")]
    MalformedFile(String),
}

fn format_violations(violations: &[PartitionViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
