use ahgeo_core::GeoError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("bad arguments for `{entry}`: {reason}")]
    BadArguments { entry: String, reason: String },
    #[error("entry `{entry}` is a {kind} and cannot be used with `{runner}`")]
    IncompatibleEntry { entry: String, kind: &'static str, runner: &'static str },
    #[error("{source_name}:{line}:{column}: {message}")]
    ConfigParse { source_name: String, line: usize, column: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("catalog self-test failed for `{entry}`: {reason}")]
    SelfTest { entry: String, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Geometry(#[from] GeoError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Geometry(_) | CliError::SelfTest { .. } => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
