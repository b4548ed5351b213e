//! Command-line experiment runner for the ground-state solver.
//!
//! The binary wraps [`rnls_core`] with four concerns it deliberately keeps
//! out of the solver crate: structured experiment configs, artifact files
//! (records CSV, summary JSON, binary field checkpoints), parameter sweeps
//! on a bounded worker pool, and process exit codes scripts can branch on.
//!
//! Everything here is deterministic given a config: the only run-to-run
//! variation in any artifact is the optional timestamp header of the
//! records CSV (suppressed by `--no-timestamp`) and the measured
//! `wall_time_seconds` in the summary.

pub mod config;
pub mod fieldfile;
pub mod runner;

use rnls_core::Error as CoreError;

/// Errors of the driver layer. Solver errors pass through unchanged so the
/// exit-code mapping can see them.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unusable config text or cross-field inconsistency; parse-site
    /// problems carry `line N:` in the message.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed field file; `offset` is the byte position of the problem.
    #[error("field file error at byte {offset}: {msg}")]
    Format { offset: usize, msg: String },

    /// Strict admissibility refused the run: omega does not sit below the
    /// negated ground level of the linear operator.
    #[error(
        "Inadmissible: omega = {omega} must lie strictly below -lambda0 = {minus_lambda0}"
    )]
    Inadmissible { omega: f64, minus_lambda0: f64 },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Process exit code for a failed run.
///
/// 1 config or usage error, 2 numerical blowup, 4 inadmissible. Successful
/// runs map through [`termination_exit`] instead.
pub fn error_exit(e: &CliError) -> i32 {
    match e {
        CliError::Core(CoreError::NumericalBlowup { .. }) => 2,
        CliError::Inadmissible { .. } => 4,
        _ => 1,
    }
}

/// Process exit code for a run that returned a result: 0 when a stopping
/// rule was met, 3 on a decay violation (strict mode), 5 when the
/// iteration budget ran out before any rule triggered.
pub fn termination_exit(t: rnls_core::dgf::Termination) -> i32 {
    use rnls_core::dgf::Termination::*;
    match t {
        ResidualMet | ActionIncrementMet => 0,
        DecayViolation => 3,
        MaxIters => 5,
    }
}
