use std::path::PathBuf;

use crossover_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{source_name}, line {line}: {message}")]
    Parse { source_name: String, line: u64, message: String },
    #[error("{0}")]
    Data(String),
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 configuration, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Parse { .. } | CliError::Data(_) | CliError::Io { .. } => 3,
            CliError::Core(e) => match e.root() {
                CoreError::InvalidInput(_)
                | CoreError::TargetOutOfRange { .. }
                | CoreError::InfeasibleDesign(_)
                | CoreError::InfeasibleCorrelation { .. } => 2,
                CoreError::EmptyArm { .. } => 3,
                _ => 4,
            },
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::Parse { .. } => "ParseError",
            CliError::Data(_) => "DataError",
            CliError::Io { .. } => "IoError",
            CliError::Core(e) => e.code(),
        }
    }
}
