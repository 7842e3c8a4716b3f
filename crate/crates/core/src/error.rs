use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solvers, transport and audits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidSpec(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("field mean {mean:.3e} exceeds tolerance {tol:.1e}")]
    NonzeroMean { mean: f64, tol: f64 },

    #[error("evaluation point ({0}, {1}) coincides with a quadrature node")]
    SingularPoint(f64, f64),

    #[error("input must be positive: {0}")]
    NonpositiveInput(String),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("curve is not a candidate: {0}")]
    NotGammaCandidate(String),

    #[error("CFL violation: dt*max|V|/h = {0:.3}")]
    CflViolation(f64),

    #[error("point ({0}, {1}) left the domain")]
    OutOfDomain(f64, f64),

    #[error("abscissa {0} outside (0, 1)")]
    DegenerateAbscissa(f64),

    #[error("bracket collapsed: a = {a:e}, b = {b:e}")]
    BracketCollapse { a: f64, b: f64 },

    #[error("empty box: {0}")]
    EmptyBox(String),

    #[error("degenerate sample point ({0}, {1})")]
    DegeneratePoint(f64, f64),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("empty region: {0}")]
    EmptyRegion(String),

    #[error("norm must be positive: {0}")]
    NonPositiveNorm(String),

    #[error("energy gate failed: K(0) = {k0:.4e} > sigma/20 = {limit:.4e}")]
    EnergyGate { k0: f64, limit: f64 },

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("report: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
