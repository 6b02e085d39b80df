//! Error taxonomy for the laboratory.
//!
//! Domain errors are programming-contract violations (nonpositive volume,
//! bad preconditions). Range-violation flags on probes are *not* errors;
//! probes report them as data.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// End states violate the entropy condition v- < v+, u- > u+.
    #[error("entropy condition violated: {0}")]
    EntropyCondition(String),

    /// Shock-curve parametrization out of range.
    #[error("invalid shock parametrization: {0}")]
    InvalidShock(String),

    /// The quadratic-structure constant lost positivity (C* <= 0).
    #[error("shock too strong: {0}")]
    ShockTooStrong(String),

    /// Traveling-wave integrator failed.
    #[error("profile solver failure: {0}")]
    SolverFailure(String),

    /// Initial data violates its invariants (e.g. drives v <= 0).
    #[error("invalid initial data: {0}")]
    InvalidData(String),

    /// Specific volume hit zero during time stepping.
    #[error("vacuum formed: {0}")]
    Vacuum(String),

    /// Caller misuse of an operation (insufficient history, bad cadence, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// Scenario file parse or validation failure.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 usage, 3 runtime failure.
    /// (Exit code 1 is reserved for clean check failures, which are not
    /// represented as `Error` values.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 2,
            _ => 3,
        }
    }

    /// Short machine-readable tag for error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::EntropyCondition(_) => "entropy_condition",
            Error::InvalidShock(_) => "invalid_shock",
            Error::ShockTooStrong(_) => "shock_too_strong",
            Error::SolverFailure(_) => "solver_failure",
            Error::InvalidData(_) => "invalid_data",
            Error::Vacuum(_) => "vacuum",
            Error::Usage(_) => "usage",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
