//! Numerical core for SU(1,1) circular coherent-state superpositions.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation:
//!
//! * [`geometry`]: points of the Poincaré disk and their Möbius action,
//! * [`states`]: Perelomov coherent states, overlaps and circular superpositions,
//! * [`wigner`]: closed-form Wigner distributions on masked Cartesian grids,
//! * [`sensitivity`]: displacement overlaps `S(δ)` and first-orthogonality radii,
//! * [`fock`]: a brute-force truncated Fock-space oracle for every closed form,
//! * [`feature`]: marching-squares zero contours, isotropy and scaling fits.
//!
//! File formats, parallel grid evaluation and the command-line front end live in
//! the `su11-phase-lab` crate.

#![no_std]
// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod feature;
pub mod fock;
pub mod geometry;
pub mod sensitivity;
pub mod states;
pub mod wigner;

pub use error::{Error, Result};
pub use geometry::{DiskPoint, HyperbolicPoint};
pub use num_complex::Complex64;
pub use states::{BargmannIndex, CircularState, CircularStateSpec};
pub use wigner::{PhaseSpaceGrid, ScalarField};
