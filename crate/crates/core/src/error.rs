use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// The requested computation is larger than the configured budget. Nothing
    /// is sampled or truncated in its place.
    #[error("budget exceeded in {stage}: needs {needed}, budget is {budget}")]
    BudgetExceeded {
        stage: String,
        needed: String,
        budget: String,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("label cover instance is not a projection game")]
    NotProjection,

    #[error("structures have different vocabularies")]
    VocabularyMismatch,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("retry budget exhausted after {0} attempts")]
    RetriesExhausted(usize),

    #[error("internal check failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn budget(stage: &str, needed: impl ToString, budget: impl ToString) -> Self {
        Error::BudgetExceeded {
            stage: stage.to_string(),
            needed: needed.to_string(),
            budget: budget.to_string(),
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::RetriesExhausted(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
