//! Relative equilibria (RE) of planar Newtonian dumbbell systems.
//!
//! A dumbbell is two point masses joined by a massless rigid rod. This crate
//! locates RE — circular orbits that are fixed points of the rotation-reduced
//! dynamics, equivalently critical points of the amended potential at fixed
//! angular momentum — for three planar models of increasing complexity:
//!
//! * the point-mass two-body problem ([`kepler`]),
//! * a dumbbell orbiting a point mass ([`model::Db1Params`]),
//! * two dumbbells orbiting each other ([`model::Db2Params`]).
//!
//! On top of the potential-theory layer sit branch profiles and continuation
//! ([`finder`]), energetic and linear stability classification ([`stability`]),
//! pitchfork normal forms for the symmetry-breaking branch points
//! ([`pitchfork`]), reduced-dynamics integration ([`dynamics`]), and the
//! perpendicular-bisector cone test ([`perp_bisector`]).
//!
//! All core math is generic over the scalar type through [`Real`]; `f64` is
//! the default type parameter everywhere, so `Db1Params::new(0.5, 0.5)` just
//! works.

// Validations use `!(x > 0)` so NaN inputs are rejected along with
// out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the matrix formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod dynamics;
pub mod error;
pub mod finder;
pub mod kepler;
pub mod linalg;
pub mod model;
pub mod perp_bisector;
pub mod pitchfork;
pub mod real;
pub mod stability;

pub use error::{Error, Result};
pub use real::Real;

/// 2x2 symmetric matrix (row-major), as produced by the Db1 Hessian.
pub type Mat2<T = f64> = [[T; 2]; 2];
/// 3x3 symmetric matrix (row-major), as produced by the Db2 Hessian.
pub type Mat3<T = f64> = [[T; 3]; 3];
/// 4x4 linearization matrix of the reduced dumbbell/point-mass system.
pub type Mat4<T = f64> = [[T; 4]; 4];
/// 6x6 linearization matrix of the reduced two-dumbbell system.
pub type Mat6<T = f64> = [[T; 6]; 6];
