//! Library side of the `absep` command: input parsing, sweeps and the demo
//! table. `main.rs` only wires these to the command line.

pub mod demo;
pub mod input;
pub mod report;
pub mod sweep;

/// Process exit codes.
pub mod exit {
    pub const HOLDS: i32 = 0;
    pub const FAILS: i32 = 1;
    pub const UNDETERMINED: i32 = 2;
    /// Malformed input or usage error.
    pub const USAGE: i32 = 64;
    /// File could not be read or written.
    pub const IO: i32 = 74;
}

/// Error classes that decide the exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io(_) => exit::IO,
        }
    }
}

impl From<absep::Error> for CliError {
    fn from(e: absep::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
