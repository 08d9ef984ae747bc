//! Error type shared by all modules.

/// Errors produced by state validation, the model, the solvers and the
/// optimizers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Matrix is not Hermitian within the elementwise tolerance.
    #[error("matrix is not Hermitian: max |m - m^dag| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// Trace differs from one beyond tolerance.
    #[error("state trace deviates from one: Tr = {trace:.17}")]
    TraceNotOne { trace: f64 },

    /// Negative eigenvalue beyond tolerance.
    #[error("state is not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    /// An argument is outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quantity that must be real carries a significant imaginary residue.
    #[error("numerical consistency: {0}")]
    NumericalConsistency(String),

    /// The integrator produced an invalid state.
    #[error("integration failed at step {step}: {reason}")]
    IntegrationFailure { step: usize, reason: String },

    /// Two objects that must share a time grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The optimizer encountered a non-finite objective value.
    #[error("optimizer aborted at iteration {iteration}: {reason}")]
    OptimizerAbort { iteration: usize, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
