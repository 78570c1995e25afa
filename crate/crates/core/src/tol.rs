//! Numerical tolerances shared across the crate.

/// Row normalization and clamping of small negative entries.
pub const NORM: f64 = 1e-9;

/// Default threshold below which a signaling measure counts as zero.
pub const SIG: f64 = 1e-9;

/// Probabilities at or below this value cannot be conditioned on.
pub const ZERO: f64 = 1e-12;

/// Hermiticity, idempotence, trace and positivity checks on quantum inputs.
pub const QUANTUM: f64 = 1e-10;
