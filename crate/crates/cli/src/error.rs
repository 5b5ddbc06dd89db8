use std::fmt;

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration, missing referenced files.
    Config(String),
    /// Requested size beyond a documented cap.
    Capacity(String),
    /// Anything that goes wrong while running.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    /// Core errors raised while interpreting the configuration.
    pub fn config(e: gasket_hydro::Error) -> Self {
        match e {
            gasket_hydro::Error::Capacity(m) => CliError::Capacity(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Capacity(m) => write!(f, "capacity error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gasket_hydro::Error> for CliError {
    fn from(e: gasket_hydro::Error) -> Self {
        match e {
            gasket_hydro::Error::Capacity(m) => CliError::Capacity(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
