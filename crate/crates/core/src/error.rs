//! Error type shared by the solver modules.

/// Errors reported by grid construction, model setup, the flow driver and
/// the diagnostic routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A field or grid argument is structurally unusable: wrong length,
    /// non-finite entries, or two fields living on different grids.
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// Model parameters violate the standing assumptions (defocusing sign,
    /// rotation without a trap, rotation faster than the trap, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An argument left the mathematical domain of a special function.
    #[error("domain error: {0}")]
    DomainError(String),

    /// The 1d modulus equation has no root: omega is not below the
    /// Dirichlet ground level -pi^2 / (2 L^2).
    #[error("no solution: omega = {omega} is not admissible on length {length}")]
    NoSolution { omega: f64, length: f64 },

    /// The modulus root lies too close to 1 for reliable evaluation; the
    /// final bisection bracket is reported.
    #[error("modulus root too close to 1 (bracket [{lo}, {hi}])")]
    ModulusNearOne { lo: f64, hi: f64 },

    /// The phase-alignment pairing is numerically zero, so no preferred
    /// phase exists.
    #[error("degenerate phase alignment: pairing magnitude {magnitude} below threshold")]
    DegenerateAlignment { magnitude: f64 },

    /// A regression or report was asked for on fewer usable samples than
    /// the method needs.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The ground-level eigensolver failed to converge.
    #[error("lambda0 estimation failed after {iterations} iterations (residual {residual})")]
    Lambda0Failed { iterations: usize, residual: f64 },

    /// The flow was started from unusable data (zero field, grid mismatch).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterate left the representable range; the first bad iteration is
    /// reported.
    #[error("numerical blowup at iteration {iteration}")]
    NumericalBlowup { iteration: usize },
}
