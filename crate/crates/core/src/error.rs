use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimated error {error:.3e}")]
    Quadrature { lo: f64, hi: f64, error: f64 },

    #[error("matrix is singular at omega = {omega}")]
    Singular { omega: String },

    #[error("Newton iteration failed in sector {sector} after {iterations} iterations (|det| = {residual:.3e})")]
    Newton {
        sector: String,
        iterations: usize,
        residual: f64,
    },

    #[error("generator kernel has dimension {0}, expected 1")]
    DegenerateKernel(usize),

    #[error("limit exceeded: {0}")]
    Limit(String),

    #[error("integration step failed: {0}")]
    Step(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Singular { .. }
                | Error::Newton { .. }
                | Error::DegenerateKernel(_)
                | Error::Step(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::InvalidInput(_) => "invalid_input",
            Error::Quadrature { .. } => "quadrature",
            Error::Singular { .. } => "singular",
            Error::Newton { .. } => "newton",
            Error::DegenerateKernel(_) => "degenerate_kernel",
            Error::Limit(_) => "limit",
            Error::Step(_) => "step",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
