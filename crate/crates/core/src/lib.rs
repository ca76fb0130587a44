//! Maximal and Carleson functionals on truncated dyadic trees.
//!
//! The crate works over the base cube `[0,1)^n` and dyadic levels `0..=D`.
//! Sequences indexed by dyadic cubes ([`DyadicField`]), piecewise-constant
//! functions on the upper half-space ([`GridFunction`]) and piecewise-constant
//! functions on the boundary ([`BoundaryFunction`]) are the three data types;
//! everything else maps between them.
//!
//! * [`functionals`]: non-tangential maximal functions, Carleson functionals,
//!   Hardy--Littlewood maximal functions, the area integral and the modified
//!   Carleson norm, in exact dyadic and sampled continuum versions.
//! * [`duality`]: the sequence pairing, its upper bound and the constructive
//!   near-extremizers for both dual norms, including the stopping-time forest.
//! * [`oracle`]: brute-force dual norms on small trees.
//! * [`continuum`]: dyadic versus continuum norm comparisons.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons reject NaN

extern crate alloc;

pub mod continuum;
pub mod duality;
mod error;
pub mod fields;
pub mod functionals;
pub mod geometry;
pub mod oracle;
pub mod random;

pub use error::{Error, Result};
pub use fields::{BoundaryFunction, DyadicField, ExponentConfig, GridFunction, Normalization};
pub use geometry::{DyadicCube, GeometryConfig, GridCube, Region, TreeConfig};
