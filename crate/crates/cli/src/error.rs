use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config values or input files.
    #[error("{0}")]
    Input(String),

    /// One or more verification checks missed their threshold.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Core(#[from] gsqc_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 0 success, 1 verification failure, 2 input error, 3 numerical abort.
    pub fn exit_code(&self) -> ExitCode {
        use gsqc_core::Error as E;
        let code = match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                E::NoConvergence { .. }
                | E::Eigensolver { .. }
                | E::DtTooLarge { .. }
                | E::NormDrift { .. }
                | E::BisectionCap { .. }
                | E::EmptyFinalRow { .. } => 3,
                _ => 2,
            },
        };
        ExitCode::from(code)
    }
}
