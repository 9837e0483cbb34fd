use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// A non-finite value produced while simulating a path.
    #[error("non-finite value {value} on path {path} at step {step}")]
    PathNumeric { path: usize, step: usize, value: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("correlation |rho| = 1 is degenerate for this operation")]
    DegenerateCorrelation,

    /// The quadratic variation reaches one inside the requested grid.
    #[error("grid extends past the stopping time tau = {tau} where [Z] reaches 1")]
    Horizon { tau: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error bound {error}")]
    Accuracy { estimate: f64, error: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}
