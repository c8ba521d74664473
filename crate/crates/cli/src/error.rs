use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the scenario runner, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: config fields, flag values, unreadable config file.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// A numerical invariant was violated during a run.
    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for anything the caller can fix by changing input, 2 for numerics.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<qkt_core::Error> for CliError {
    fn from(e: qkt_core::Error) -> Self {
        use qkt_core::Error as E;
        match e {
            E::InvalidSpin(j) => CliError::validation("J", format!("{j} is not a positive multiple of 1/2")),
            E::InvalidParameter { field, reason } => CliError::validation(field, reason),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_split_input_from_numerics() {
        assert_eq!(CliError::validation("steps", "zero").exit_code(), 1);
        assert_eq!(CliError::Numerical("residual".into()).exit_code(), 2);
        let e: CliError = qkt_core::Error::NegativeVariance(-1.0).into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError = qkt_core::Error::InvalidSpin(0.3).into();
        assert!(matches!(e, CliError::Validation { ref field, .. } if field == "J"));
    }
}
