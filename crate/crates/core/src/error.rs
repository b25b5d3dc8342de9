use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("eigensolver did not converge: ‖A‖_F = {norm:.6e}, {sweeps} sweeps, off-diagonal {off:.3e}")]
    NoConvergence { norm: f64, sweeps: usize, off: f64 },

    #[error("point {point} is outside the domain of {function}")]
    Domain { function: String, point: String },

    #[error("{function} is not differentiable at {point}")]
    Kink { function: String, point: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient decay: tail estimate {tail:.3e} exceeds 10% of value {value:.3e}")]
    InsufficientDecay { tail: f64, value: f64 },

    #[error("problem size {rows}x{cols} exceeds solver cap {cap}")]
    TooLarge { rows: usize, cols: usize, cap: usize },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
