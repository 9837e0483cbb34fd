use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parameter error: {0}")]
    Param(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("output error: {0}")]
    Output(String),
    #[error("verification failed: {0} check(s) did not pass")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Param(_) => 1,
            CliError::Numeric(_) | CliError::Output(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<conic::Error> for CliError {
    fn from(e: conic::Error) -> Self {
        match e {
            conic::Error::Domain(_)
            | conic::Error::Parse(_)
            | conic::Error::DegenerateCorrelation
            | conic::Error::Horizon { .. } => CliError::Param(e.to_string()),
            conic::Error::Io(m) => CliError::Output(m),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
