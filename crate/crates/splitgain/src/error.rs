use crate::data::GroupId;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A group id was requested that the dataset does not contain.
    #[error("group {0} not present in dataset")]
    GroupNotFound(GroupId),

    /// Feature vector length disagrees with the dataset or classifier dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Labels must be 0 or 1.
    #[error("label must be 0 or 1, got {0}")]
    InvalidLabel(f64),

    /// A dataset, group, or distribution with no samples where at least one is required.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Not enough samples in a group to run the requested cross-validation.
    #[error("group {group} has {available} samples, cross-validation needs at least {needed}")]
    InsufficientSamples {
        group: GroupId,
        available: usize,
        needed: usize,
    },

    /// Chi-square divergence is undefined when the reference distribution
    /// assigns zero mass to a point the other distribution charges.
    #[error("chi-square undefined: reference distribution has zero mass on a charged atom")]
    NotAbsolutelyContinuous,

    /// Exhaustive search is only available for enumerable hypothesis classes.
    #[error("exact enumeration is not supported for this hypothesis class")]
    EnumerationUnsupported,

    /// A configuration value outside its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A per-group classifier map is missing an entry for a dataset group.
    #[error("no classifier supplied for group {0}")]
    MissingGroupClassifier(GroupId),

    /// Malformed tabular input, located by line and column where possible.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: String,
        message: String,
    },

    /// A column whose cells mix numeric and non-numeric values.
    #[error("ambiguous column type for '{column}': {message}")]
    AmbiguousColumnType { column: String, message: String },

    /// Preprocessing constraint violations (non-binary sensitive column, empty group, ...).
    #[error("preprocessing failed: {0}")]
    Preprocess(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Remote fetch failures carry the URL and, when available, the HTTP status.
    #[error("fetch of {url} failed: {reason}")]
    Fetch { url: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
