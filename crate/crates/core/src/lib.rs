//! Planar exponentiated Hencky elasticity.
//!
//! - [`tensor2`]: closed-form 2×2 SVD, polar decomposition and symmetric
//!   matrix logarithm.
//! - [`constitutive`]: the energy, its volumetric/isochoric parts and the
//!   first Piola-Kirchhoff stress.
//! - [`convexity`]: sampling- and grid-based certification of the convexity
//!   properties of the energy.
//! - [`elastostatics`]: P1 finite elements and a descent minimizer for the
//!   pure Dirichlet problem.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constitutive;
pub mod convexity;
pub mod elastostatics;
pub mod error;
pub mod sampling;
pub mod tensor2;

pub use constitutive::{energy, pk1_stress, EnergyValue, MaterialParams};
pub use error::{Error, Result};
pub use tensor2::Mat2;
