use num_complex::Complex64;
use thiserror::Error;

/// Errors reported by the numerical pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("spectra overlap: closest eigenvalue pair sum has modulus {0:.3e}")]
    SpectraOverlap(f64),
    #[error("Hamiltonian eigenvalue within {0:.3e} of the imaginary axis")]
    ImaginaryAxisEigenvalue(f64),
    #[error("no stabilizing Riccati solution: {0}")]
    NoStabilizingSolution(String),
    #[error("evaluation point {0} hits a pole")]
    PoleHit(Complex64),
    #[error("the pair (C, A) is not observable at the working rank tolerance")]
    NotObservable,
    #[error("realization is not minimal")]
    NotMinimal,
    #[error("function failed the inner certificate (defect {0:.3e})")]
    NotInner(f64),
    #[error("zero pencil column {col} infeasible (residual {residual:.3e}); subspace tolerance too loose")]
    InfeasibleColumn { col: usize, residual: f64 },
    #[error("Riccati construction failed: {0}")]
    RiccatiFailure(String),
    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),
    #[error("matrix entries must be finite")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, Error>;
