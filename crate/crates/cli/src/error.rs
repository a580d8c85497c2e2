use ong_core::OngError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Core(#[from] OngError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const GATE_FAILED: i32 = 1;
    pub const INVALID_CONFIG: i32 = 2;
    pub const RUNTIME: i32 = 3;
}

impl LabError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidConfig(msg.into())
    }

    /// Machine-readable error class.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::InvalidConfig(_) => "invalid-config",
            LabError::Core(_) => "core",
            LabError::Io(_) => "io",
            LabError::Csv(_) => "csv",
            LabError::Json(_) => "json",
            LabError::Pool(_) => "thread-pool",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::InvalidConfig(_) => exit::INVALID_CONFIG,
            _ => exit::RUNTIME,
        }
    }

    /// The error as a one-line JSON object.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}
