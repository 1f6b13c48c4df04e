//! Polyhedral reconstruction of the Moebius space of a finite antipodal
//! space, with exact rational or float arithmetic.
//!
//! The crate is `no_std` with `alloc`. Modules, bottom up:
//!
//! * [`space`]: antipodal functions, log-weights, cross-ratios, rescaling.
//! * [`relations`]: pair relations and their graph combinatorics.
//! * [`feasibility`]: exact linear feasibility of cells.
//! * [`complex`]: the cell complex, spheres, Gromov products, `delta`.
//! * [`hull`]: tight spans and ball/hull comparisons.
//! * [`teich`]: normalized representatives, simplex coordinates, `d_moeb`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod complex;
pub mod error;
pub mod feasibility;
pub mod hull;
pub mod linalg;
pub mod matrix;
pub mod relations;
pub mod sample;
pub mod scalar;
pub mod space;
pub mod teich;

pub use error::{Error, Result};
pub use matrix::SymMatrix;
pub use relations::PairRelation;
pub use scalar::{Rational, Scalar, Tolerance};
pub use space::{AntipodalSpace, LogSpace, MoebiusVector, SeparatingMatrix};
