use std::fmt;

/// Process exit status of the `dmrf` binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 1,
    Data = 2,
    Config = 3,
    Internal = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Usage, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Data, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Config, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Internal, message: message.into() }
    }

    pub fn missing(name: &'static str) -> Self {
        CliError::config(dmrf::Error::MissingParameter(name).to_string())
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<dmrf::Error> for CliError {
    fn from(e: dmrf::Error) -> Self {
        use dmrf::Error as E;
        let kind = match &e {
            e if e.is_config() => ExitKind::Config,
            E::BadProbabilities(_) => ExitKind::Internal,
            _ => ExitKind::Data,
        };
        CliError { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data(e.to_string())
    }
}
