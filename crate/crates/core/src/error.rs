use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters violate a documented precondition.
    #[error("configuration error: {0}")]
    Config(&'static str),
    /// Histograms with different (lo, hi, bins) cannot be combined.
    #[error("histogram shape mismatch")]
    ShapeMismatch,
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// The QR iteration did not converge within its budget.
    #[error("QR iteration failed to converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    /// A linear system was numerically singular.
    #[error("singular matrix")]
    Singular,
    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },
    /// A bracketing root finder was handed an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    /// The claimed eigenvalue failed the residual test.
    #[error("not an eigenvalue: relative residual {residual:e}")]
    NotAnEigenvalue { residual: f64 },
    /// Eigenvector solve is too ill conditioned to deflate.
    #[error("defective or ill-conditioned eigenpair")]
    Defective,
    /// Rejection sampling exhausted its attempt budget.
    #[error("sampling failed after {attempts} attempts")]
    SamplingExhausted { attempts: usize },
    /// Estimation has no data to work with.
    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),
}
