use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("infeasible action: {0}")]
    InfeasibleAction(String),

    #[error("vehicles already in contact (gap {gap:.3} m)")]
    AlreadyColliding { gap: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("value {value} of `{field}` lies outside the proposal support")]
    OutsideSupport { field: String, value: f64 },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
