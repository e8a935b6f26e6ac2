//! Geometry of single-qubit channels.
//!
//! Unital qubit channels act on Bloch vectors as `s -> A s`; when `A` is
//! diagonal its entries `(eta_x, eta_y, eta_z)` live in the cube `[-1, 1]^3`
//! (positive maps) and the completely positive ones form the tetrahedron
//! spanned by the identity and the three pi-rotations. This crate works in
//! that coordinate system:
//!
//! - [`matkit`]: small dense complex/real kernels (Jacobi eigensolver, 3x3 SVD,
//!   unitary exponentials, partial trace).
//! - [`channel`]: states, affine channels, Choi matrices and the CP test,
//!   the rotation-diagonal-rotation canonical form, and a catalog of named maps.
//! - [`tetra`]: tetrahedron membership, Pauli weights, nearest-CP projections
//!   and the decomposition of positive maps into CP plus CP-after-transpose.
//! - [`dynamics`]: coupling Hamiltonians that generate unital channels in time.
//! - [`netsim`]: compilation of a unital channel into rotations around a
//!   Pauli mixture, executed exactly or by Monte Carlo sampling.
//! - [`qkd`]: symmetric incoherent attacks on four- and six-state key
//!   distribution.
//! - [`cli`]: the `qgeom` command-line driver.

pub mod channel;
pub mod cli;
pub mod dynamics;
mod error;
pub mod matkit;
pub mod netsim;
pub mod numfmt;
pub mod qkd;
pub mod tetra;

pub use error::{Error, Result};
