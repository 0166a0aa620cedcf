use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsnsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("spectral support violation: {0}")]
    SupportViolation(String),
    #[error("dyadic window does not cover {count} excited modes, e.g. {examples}")]
    WindowCoverage { count: usize, examples: String },
    #[error("fixed-point contraction failed after {iterations} iterations (last increment {last_increment:e})")]
    ContractionFailure {
        iterations: usize,
        last_increment: f64,
    },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CsnsError {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            CsnsError::InvalidGrid(_) => "invalid_grid",
            CsnsError::GridMismatch => "grid_mismatch",
            CsnsError::Precondition(_) => "precondition",
            CsnsError::SupportViolation(_) => "support_violation",
            CsnsError::WindowCoverage { .. } => "window_coverage",
            CsnsError::ContractionFailure { .. } => "contraction_failure",
            CsnsError::Solver(_) => "solver",
            CsnsError::Format(_) => "format",
            CsnsError::Io(_) => "io",
            CsnsError::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, CsnsError>;
