use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The free completions of a query exceed the exhaustive-search cap.
    #[error("search space exceeded: {completions} completions to check, cap is {cap} (use a smaller model or fix more features)")]
    SearchSpaceExceeded { completions: u128, cap: u64 },

    #[error("budget exceeded: {what} limit of {limit} reached")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("seed is not sufficient for the prediction")]
    SeedNotSufficient,

    #[error("seed feature {0} is not a feature of the instance")]
    SeedOutOfRange(usize),

    #[error("no instance predicts into the requested target classes")]
    TargetUnreachable,

    #[error("invalid target set: {0}")]
    InvalidTarget(String),

    #[error("invalid feature order: {0}")]
    InvalidOrder(String),

    #[error("instance predicts class {actual}, not {expected}")]
    PredictionMismatch { expected: usize, actual: usize },

    #[error("instance has {features} features, brute-force cap is {cap}")]
    TooLarge { features: usize, cap: usize },

    #[error("instance has {actual} values, feature space has {expected} features")]
    InstanceArity { expected: usize, actual: usize },

    #[error("model validation failed:\n{0}")]
    Validation(ValidationReport),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("{message} (row {row}, col {column})")]
    InstanceCell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("instance header: {0}")]
    InstanceHeader(String),

    #[error("internal defect: {0}")]
    Internal(String),
}

impl Error {
    /// True for the errors that signal a resource cap rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::SearchSpaceExceeded { .. }
                | Error::BudgetExceeded { .. }
                | Error::TooLarge { .. }
        )
    }

    /// True for parse and validation failures of user-supplied files.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::Syntax { .. }
                | Error::Schema { .. }
                | Error::InstanceCell { .. }
                | Error::InstanceHeader(_)
                | Error::InstanceArity { .. }
        )
    }
}
