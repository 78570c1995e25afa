use thiserror::Error;

use crate::behavior::{SignalingReport, ValidationReport};
use crate::quantum::QuantumReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} `{name}`")]
    UnknownIndex { kind: &'static str, name: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("validation failed with {} violation(s)", .0.violations.len())]
    Invalid(ValidationReport),

    #[error("invalid quantum input with {} violation(s)", .0.violations.len())]
    InvalidQuantum(QuantumReport),

    #[error("cannot condition on an outcome with probability {probability:e}")]
    ZeroProbability { probability: f64 },

    #[error(
        "conditioning probability depends on the local context (signaling {:e})",
        .0.sig_to_remote
    )]
    Signaling(Box<SignalingReport>),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no signaling perturbation is feasible: {0}")]
    Degenerate(String),

    #[error("projection did not converge after {iterations} iterations (move {last_move:e}, signaling {signaling:e})")]
    NonConvergence {
        iterations: usize,
        last_move: f64,
        signaling: f64,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
