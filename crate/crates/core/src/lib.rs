//! Gridless direction-of-arrival estimation for arbitrary linear arrays.
//!
//! The pipeline turns a single snapshot from a (possibly non-uniform) linear
//! array into target angles and complex amplitudes without an angle grid:
//! the array manifold is separated into a Bessel-coefficient sampling matrix
//! times a Vandermonde vector of a virtual uniform array, an accelerated
//! proximal gradient solver recovers a low-rank Hermitian Toeplitz matrix
//! from the snapshot, and polynomial rooting of its noise subspace yields
//! the angles. Classic Bartlett beamforming and grid-based l1 recovery are
//! included as baselines, together with the evaluation metrics used by the
//! experiment harness.

pub mod bessel;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod manifold;
pub mod metrics;
pub mod rooting;
pub mod solvers;

pub use error::{DoaError, Result};




/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
