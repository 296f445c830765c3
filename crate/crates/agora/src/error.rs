//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its invariant. Names the offending field.
    #[error("invalid configuration: field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    /// Two values that must share a dimension do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An operation that requires data received none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// An operation needs more data points than it was given.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A purchase quantity exceeds the dataset on offer.
    #[error("quantity {requested} exceeds dataset size {size}")]
    Quantity { requested: usize, size: usize },

    /// More shared samples requested than the dataset holds.
    #[error("cannot share {requested} samples from a dataset of {size}")]
    SampleCount { requested: usize, size: usize },

    /// A provider's full dataset costs more than the acquirer's budget.
    #[error("provider {provider}: full price {price} exceeds budget {budget}")]
    Affordability {
        provider: usize,
        price: String,
        budget: String,
    },

    /// A parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A top-2 allocation had no providers left after cost filtering.
    #[error("allocation failed: {0}")]
    Allocation(String),

    /// A decision's exact cost exceeds the budget. Evaluation refuses it.
    #[error("cost {cost} exceeds budget {budget}")]
    BudgetExceeded { cost: String, budget: String },

    /// The model trainer was handed data it cannot fit.
    #[error("degenerate training data: {0}")]
    Degenerate(String),

    /// An unknown strategy string was supplied.
    #[error("unknown strategy `{given}`; valid strategies: {valid}")]
    UnknownStrategy { given: String, valid: String },

    /// A report is missing a (strategy, market) cell.
    #[error("incomplete data: {0}")]
    IncompleteData(String),

    /// File I/O failure, annotated with the path involved.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A file failed to parse, annotated with the path involved.
    #[error("parse error in {path}: {reason}")]
    Parse { path: String, reason: String },

    /// A per-market failure inside a multi-market run, annotated with the
    /// 1-based market index.
    #[error("market {index}: {source}")]
    InMarket {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code class for the CLI: 2 = bad usage/config,
    /// 3 = I/O or parse failure, 4 = domain violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parameter(_) | Error::UnknownStrategy { .. } => 2,
            Error::Io { .. } | Error::Parse { .. } => 3,
            Error::InMarket { source, .. } => source.exit_code(),
            _ => 4,
        }
    }
}
