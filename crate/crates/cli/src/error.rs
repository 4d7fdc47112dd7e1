use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] tensorank::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Read { .. } | Self::Core(tensorank::Error::Malformed(_)) => 3,
            Self::Usage(_) => 2,
            Self::Core(tensorank::Error::BudgetExceeded(_)) => 4,
            Self::Core(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "usage",
            3 => "malformed-input",
            4 => "budget-exceeded",
            _ => "computation-failed",
        }
    }

    /// One line of JSON for standard error.
    pub fn diagnostic(&self) -> String {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}
