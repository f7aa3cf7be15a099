use thiserror::Error;

/// Error type shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular: pivot {pivot:.3e} below threshold at column {col}")]
    SingularMatrix { col: usize, pivot: f64 },
    #[error("matrix is numerically singular (sigma_min/sigma_max below cutoff)")]
    NumericallySingular,
    #[error("{algorithm} did not converge within {limit} sweeps/iterations")]
    NoConvergence { algorithm: &'static str, limit: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("zero diagonal entry at row {0}")]
    ZeroDiagonal(usize),
    #[error("ILU(0) hit a zero pivot at row {0}")]
    ZeroPivot(usize),
    #[error("degenerate singular spectrum: leading or trailing gap below resolution")]
    DegenerateSpectrum,
    #[error("inner least-squares solve failed during attack step")]
    InnerSolveFailure,
    #[error("bound precondition failed: epsilon * ||X^-1|| = {0} >= 1")]
    PreconditionFailed(f64),
    #[error("invalid alpha: 2 - gamma * alpha^2 * L = {0} is not positive")]
    InvalidAlpha(f64),
    #[error("too few samples for the t-test: {0} < 3")]
    TooFewSamples(usize),
    #[error("zero variance across samples; t-statistic undefined")]
    ZeroVariance,
    #[error("matrix is not symmetric: max asymmetry {0:.3e}")]
    NotSymmetric(f64),
    #[error("matrix is defective: eigenvector basis numerically singular")]
    DefectiveMatrix,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
