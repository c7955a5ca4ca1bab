use thiserror::Error;

/// Errors raised by the library layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("dyadic block 2^{exponent} is not resolvable on this grid (window [{low:.6}, {high:.6}])")]
    Unresolvable { exponent: i32, low: f64, high: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("quadrature missed tolerance {tol:e} after {panels} panels (last change {change:e})")]
    Quadrature { tol: f64, panels: usize, change: f64 },

    #[error("truncation unsafe: support {support:.4} + horizon {horizon:.4} + 1 exceeds domain length {length:.4}")]
    TruncationUnsafe { support: f64, horizon: f64, length: f64 },

    #[error("solver failure at t = {t:.6}: {reason}")]
    SolverFailure { t: f64, reason: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// Innermost error, skipping stage labels.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
