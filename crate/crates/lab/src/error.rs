use std::path::PathBuf;

use su11_core::Error as CoreError;

/// Everything a command can fail with. The variant decides the exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

pub type LabResult<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn usage(msg: impl Into<String>) -> Self {
        LabError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        LabError::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// 1 for anything the caller got wrong, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::OutsideDisk { .. }
            | CoreError::InvalidParameter(_)
            | CoreError::UnsupportedRealization(_) => LabError::Usage(e.to_string()),
            _ => LabError::Numerical(e.to_string()),
        }
    }
}
