//! Tropical central paths of parametric linear programs.
//!
//! The crate is organised bottom-up:
//!
//! - [`tropical`]: max-plus scalars, vectors, matrices, the Funk and Hilbert
//!   distances and the two-valued tropical angle.
//! - [`puiseux`]: finite generalized Puiseux polynomials in a parameter `t`,
//!   used as exact coefficients of parametric LPs.
//! - [`troppoly`]: tropical halfspace systems, tropicalization, sign
//!   genericity and the tropical barycenter.
//! - [`counterexample`]: the staircase family `LP_r` and its exact tropical
//!   central path.
//! - [`numeric`]: Newton continuation along the classical central path of an
//!   instantiated LP.
//! - [`curvature`]: total curvature of polygonal traces and tropical lower
//!   bounds.
//! - [`io`]: the LP JSON document and the CSV trace formats.

pub mod counterexample;
pub mod curvature;
pub mod io;
pub mod numeric;
pub mod puiseux;
pub mod tropical;
pub mod troppoly;

pub use num_rational::BigRational as Rational;
