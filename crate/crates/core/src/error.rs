use crate::dw_solver::SolveReport;
use crate::game_value::ValueCertificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("width is undefined: {0}")]
    UndefinedWidth(String),

    #[error("value_approx did not reach tolerance after {iterations} iterations (best gap {best_gap})")]
    NonConvergence {
        iterations: u64,
        best_gap: f64,
        best: Box<ValueCertificate>,
    },

    #[error("iteration budget of {budget} exhausted without a certificate")]
    BudgetExhausted { budget: u64, report: Box<SolveReport> },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }
}
