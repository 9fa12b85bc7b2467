use std::fmt;

use xyinfo::Error as CoreError;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing configuration; `field` is the dotted config path.
    Config { field: String, message: String },
    Numerical(String),
    /// The run finished but did not meet the stated expectation.
    Mismatch(String),
    Io(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { field: field.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }

    /// Classifies a library error raised while building objects from the
    /// config section `section`.
    pub fn from_core(section: &str, err: CoreError) -> Self {
        let field = match &err {
            CoreError::InvalidSpec { field, .. } => Some(format!("{section}.{field}")),
            CoreError::SiteOutOfRange { .. } => Some(format!("{section}.sites")),
            CoreError::NegativeBeta(_) => Some("rest.beta".to_string()),
            CoreError::OutsideBlochBall { .. } => Some("measurement.sender".to_string()),
            CoreError::SingularDirections { .. } => Some("measurement.directions".to_string()),
            CoreError::NegativeSigma(_) => Some("measurement.sigma".to_string()),
            CoreError::BadTolerance { name, .. } => Some(format!("tolerances.{name}")),
            CoreError::EmptyGrid | CoreError::NonIncreasingGrid { .. } => Some("time".to_string()),
            _ => None,
        };
        match field {
            Some(field) => CliError::Config { field, message: err.to_string() },
            None => CliError::Numerical(err.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, message } => write!(f, "config error in `{field}`: {message}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Mismatch(m) => write!(f, "expectation not met: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
