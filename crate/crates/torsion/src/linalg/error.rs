use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vectors do not lie in the span of the target basis (residual {residual:.3e} > tol {tol:.3e})")]
    NotInSpan { residual: f64, tol: f64 },

    #[error("numerical rank is ambiguous: pivot magnitudes straddle the tolerance {tol:.3e} (smallest accepted {accepted:.3e}, largest rejected {rejected:.3e})")]
    AmbiguousRank {
        tol: f64,
        accepted: f64,
        rejected: f64,
    },

    #[error("eigenvalue iteration failed to converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("eigenvalue {eigenvalue} has real part within {gap_tol:.3e} of the threshold K = {threshold}")]
    ThresholdCollision {
        eigenvalue: Complex64,
        threshold: f64,
        gap_tol: f64,
    },

    #[error("system is singular beyond tolerance")]
    Singular,

    #[error("non-finite entry encountered")]
    NonFinite,
}
