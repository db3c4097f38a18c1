//! Default tolerances shared by every module.
//!
//! All arithmetic is binary64. Comparisons against exact mathematical
//! identities use [`EXACT`]; comparisons that involve the difference-quotient
//! oracle use [`ORACLE`].

/// Exact-formula paths (support faces, eigenvalue formulas).
pub const EXACT: f64 = 1e-9;

/// Agreement floor between exact values and the limit oracle.
pub const ORACLE: f64 = 1e-6;

/// Relative cutoff, scaled by `||x||_inf`, below which a coordinate counts as zero
/// (l1 faces) or as tied with the maximum (l-infinity faces).
pub const ZERO_CUTOFF: f64 = 1e-12;

/// Additivity residual tolerance, scaled by `||x|| (||y1|| + ||y2||)`.
pub const ADDITIVITY: f64 = 1e-8;

/// Orthogonality tolerance, scaled by `||x|| ||y||`.
pub const ORTHOGONALITY: f64 = 1e-9;

/// Relative eigenvalue (or column norm) gap under which two values count as the maximum.
pub const ATTAINMENT: f64 = 1e-9;

/// Raw difference quotients must be monotone to within this, plus rounding noise.
pub const MONOTONE: f64 = 1e-12;

/// Off-diagonal Frobenius mass (relative) at which cyclic Jacobi stops.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-12;

/// Largest number of zero coordinates for which an l1 face is enumerated.
pub const MAX_L1_ZERO_COORDS: usize = 20;
