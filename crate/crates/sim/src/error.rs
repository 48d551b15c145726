use serde_json::json;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("config: {0}")]
    Config(String),
    /// The library refused the parameters or the oracle basis overflowed.
    #[error("numerical regime: {0}")]
    Regime(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl SimError {
    pub fn exit_code(&self) -> u8 {
        match self {
            SimError::Config(_) => 2,
            SimError::Regime(_) => 3,
            SimError::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SimError::Config(_) => "config",
            SimError::Regime(_) => "regime",
            SimError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let message = match self {
            SimError::Config(m) | SimError::Regime(m) | SimError::Io(m) => m,
        };
        json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": message } })
    }
}

impl From<cslfield::Error> for SimError {
    fn from(e: cslfield::Error) -> Self {
        match e {
            cslfield::Error::InvalidParameter { .. } => SimError::Config(e.to_string()),
            _ => SimError::Regime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e.to_string())
    }
}
