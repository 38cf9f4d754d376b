use std::fmt;

use delentropy::ErrorKind;

/// Failure of a whole command. Per-entry failures are reported inside the
/// command output instead.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values.
    Usage(String),
    /// Input that could not be read, parsed or joined.
    Data(String),
    Core(delentropy::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Core(e) => kind_code(e.kind()),
        }
    }
}

pub fn kind_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Config => 1,
        ErrorKind::Data => 2,
        ErrorKind::Numerical => 3,
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<delentropy::Error> for CliError {
    fn from(e: delentropy::Error) -> Self {
        CliError::Core(e)
    }
}
