use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters (a={a}, b={b}, tau={tau}): require 0 < a <= b <= tau")]
    InvalidParams { a: u32, b: u32, tau: u32 },

    #[error("dispersion vector has total zero")]
    ZeroTotal,

    #[error("dispersion vector has no symbol in its first slot")]
    EmptyFirstSlot,

    #[error("construction 2 requires b > a > (m+1)*delta > 0, got (a={a}, b={b}, tau={tau})")]
    RegimeMismatch { a: u32, b: u32, tau: u32 },

    #[error("search space of {size} exceeds budget {budget}")]
    BudgetExceeded { size: u64, budget: u64 },

    #[error("code length {n} exceeds field order {order}")]
    LengthExceedsField { n: usize, order: usize },

    #[error("invalid code dimensions n={n}, k={k}")]
    InvalidDimensions { n: usize, k: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{erased} erasures exceed the correction capability {capability}")]
    TooManyErasures { erased: usize, capability: usize },

    #[error("horizon {horizon} is shorter than the window {window}")]
    HorizonTooShort { horizon: usize, window: usize },

    #[error("singular submatrix: generator is not MDS")]
    Singular,

    #[error("unsupported field: 2^{0}")]
    UnsupportedField(u32),

    #[error("erasure pattern index {index} outside horizon {horizon}")]
    InvalidPattern { index: usize, horizon: usize },

    #[error("probability {name}={value} outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("packet for time {got} received, expected time {expected}")]
    OutOfOrder { expected: u64, got: u64 },

    #[error("malformed stream: {0}")]
    Wire(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Wire(err.to_string())
    }
}
