use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(sldg_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<sldg_core::Error> for HarnessError {
    fn from(e: sldg_core::Error) -> Self {
        use sldg_core::Error as E;
        match e {
            E::RuleSize(_) | E::InvalidMesh(_) | E::InvalidArgument(_) | E::Unsupported(_) => {
                HarnessError::Config(e.to_string())
            }
            other => HarnessError::Numerical(other),
        }
    }
}

impl HarnessError {
    /// Process exit code: 2 for configuration errors, 3 for numerical
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Json(_) => 2,
            HarnessError::Numerical(_) => 3,
            HarnessError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(HarnessError::Config(msg.into()))
}
