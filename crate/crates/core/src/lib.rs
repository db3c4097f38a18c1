//! Norm derivatives on finite-dimensional real normed spaces.
//!
//! The one-sided derivatives
//!
//! ```text
//! rho'_+(x, y) = lim_{t -> 0+} ||x|| (||x + t y|| - ||x||) / t
//! rho'_-(x, y) = lim_{t -> 0-} ||x|| (||x + t y|| - ||x||) / t
//! rho'(x, y)   = (rho'_+(x, y) + rho'_-(x, y)) / 2
//! ```
//!
//! are computed two ways: exactly, from the support face `J(x)` of the dual
//! ball, and numerically, from one-sided difference quotients. On top of the
//! derivatives the crate decides Birkhoff-James and rho-orthogonality,
//! classifies smooth, rho-smooth and rho±-smooth points, and treats matrices
//! as operators between `l1`/Euclidean domains and the supported codomains.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod float;

pub mod derivative;
pub mod linalg;
pub mod operator;
pub mod orthogonality;
pub mod sampling;
pub mod smoothness;
pub mod space;
pub mod support;
pub mod tolerance;

pub use derivative::{
    rho, rho_limit_oracle, rho_minus, rho_of, rho_pair, rho_plus, DerivativeKind, DerivativeValue,
    Method, RhoPair, Schedule, Side,
};
pub use error::{Error, Result};
pub use operator::{NormAttainmentSet, OperatorMatrix, TheoremReport};
pub use orthogonality::{OrthogonalityVerdict, RayDiagram, Relation};
pub use smoothness::SmoothnessReport;
pub use space::{dual_norm, dual_pairing, norm, DualFunctional, SpaceDescriptor, Vector};
pub use support::{range_over_face, support_set, FaceRange, SupportFace};
