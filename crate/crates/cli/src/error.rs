use thiserror::Error;

/// Failure classes, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// A computed result failed its numerical check.
    #[error("{0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Numerical(_) => 1,
            Self::Config(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl From<signflip::Error> for CliError {
    fn from(e: signflip::Error) -> Self {
        use signflip::Error as E;
        match e {
            E::SingularMode { .. } | E::NearZeroDenominator { .. } | E::PrecisionUnreachable(_) => {
                Self::Numerical(e.to_string())
            }
            other => Self::Config(other.to_string()),
        }
    }
}
