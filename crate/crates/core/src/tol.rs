//! Centralized numerical tolerances.

/// Residual bound for algebraic identities (polynomial evaluation, Vieta).
pub const ALGEBRAIC: f64 = 1e-12;

/// Chordal distance under which two sphere points are considered equal.
pub const CHORDAL: f64 = 1e-10;

/// Tolerance for classification decisions (membership, relations).
pub const CLASSIFICATION: f64 = 1e-8;

/// Above this modulus, sphere computations switch to the chart `z -> 1/z`.
pub const CHART_SWAP: f64 = 1e8;

/// Radius used to merge numerically split multiple roots.
pub const CLUSTER: f64 = 1e-6;
