use thiserror::Error;

/// Exit codes: 2 usage, 3 data, 4 numerical failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Numerical(bn_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A failure that still produces a result document, e.g. a fit on
    /// degenerate data that is reported with `converged = false`.
    #[error("{message}")]
    Reported { output: String, message: String, code: i32 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io { .. } => 3,
            CliError::Numerical(_) => 4,
            CliError::Reported { code, .. } => *code,
        }
    }
}

impl From<bn_core::Error> for CliError {
    fn from(e: bn_core::Error) -> Self {
        match e {
            bn_core::Error::InvalidParameter(m) => CliError::Usage(m),
            bn_core::Error::EmptyData => CliError::Data("empty data".into()),
            bn_core::Error::DegenerateData(m) => CliError::Data(format!("degenerate data: {m}")),
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
