use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a formula (e.g. ρ ≤ 1, w = 0).
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point {0} lies on a branch cut of the Schwarz function")]
    BranchCut(String),
    #[error("point {0} is a pole of the Schwarz function")]
    Pole(String),
    #[error("need at least {min} boundary samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("not available: {0}")]
    NotAvailable(&'static str),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("argument out of validated range: {0}")]
    OutOfRange(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("series did not converge within {0} terms")]
    Unconverged(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by user input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidCurve(_)
                | Error::Domain(_)
                | Error::OutOfRange(_)
                | Error::NotAvailable(_)
                | Error::TooFewSamples { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
