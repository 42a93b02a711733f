//! Numerical tolerances shared across the crate.

/// Slack allowed on norms and probabilities that are exact rationals.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Amplitudes with modulus below this are dropped from sparse states.
pub const PRUNE_THRESHOLD: f64 = 1e-15;
