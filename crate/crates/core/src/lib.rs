//! Weak-field Zeeman corrections for the two-dimensional hydrogen-like atom.
//!
//! The energy of a planar hydrogenic level in a perpendicular field `b = B/B₀`
//! is the series
//!
//! ```text
//! E = ε0 Z² + ε1 b + ε2 Z⁻² b² + ε4 Z⁻⁶ b⁴ + O(b⁶)     (Hartree)
//! ```
//!
//! This crate computes the coefficients exactly, twice: from closed forms and
//! from a Sturmian expansion of the reduced Coulomb Green function. A third,
//! floating-point route diagonalizes the finite-field radial Hamiltonian and
//! fits the small-field energy curve.

pub mod coulomb2d;
pub mod exactmath;
pub mod greenfn;
pub mod laguerre;
pub mod oracle;
pub mod perturb;
pub mod quadrature;
pub mod validation;

pub use coulomb2d::{QuantumState, Spin};
pub use exactmath::Rational;
