use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration value violates its constraint. `key` names the offending field.
    #[error("invalid `{key}`: {constraint}")]
    InvalidField { key: String, constraint: String },

    #[error("configuration error: {0}")]
    Config(String),

    /// The plant state became non-finite (or left the divergence bound).
    #[error("plant diverged at t = {time} s")]
    Diverged { time: f64 },

    /// A controller produced a non-finite output or received non-finite inputs.
    #[error("controller fault at t = {time} s: {reason}")]
    ControllerFault { time: f64, reason: String },

    #[error("malformed document: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn field(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::InvalidField {
            key: key.into(),
            constraint: constraint.into(),
        }
    }

    /// True for errors caused by the user's configuration rather than the run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidField { .. } | Error::Config(_) | Error::Parse(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
