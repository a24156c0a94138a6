//! Tolerances shared across the crate.
//!
//! Algebraic identities (cocycle, relation residual, trace invariance) are held
//! to [`ALGEBRAIC`]. Anything that approaches a limit numerically (finite
//! Busemann approximants, derivative quotients) is held to [`LIMIT`].

/// Identities that hold exactly in real arithmetic.
pub const ALGEBRAIC: f64 = 1e-9;

/// Comparisons against a numerically approached limit.
pub const LIMIT: f64 = 1e-6;

/// Allowed drift of `ad - bc` from 1.
pub const DETERMINANT: f64 = 1e-12;

/// Width of the parabolic band `||tr| - 2| <= TRACE` used by [`crate::hyperbolic::classify`].
pub const TRACE: f64 = 1e-9;

/// Relative tie band when comparing squared matrix norms in the orbit tree.
pub const TIE: f64 = 1e-10;

/// Quantization step for matrix lookup keys.
pub const MATRIX_KEY_STEP: f64 = 1e-6;

/// Relative agreement required for two matrices to be the same element.
pub const MATRIX_MATCH: f64 = 1e-8;

/// Relative error target of the pair-measure quadrature.
pub const QUADRATURE: f64 = 1e-5;
