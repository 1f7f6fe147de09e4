//! Cox-Thompson fixed-energy inverse quantum scattering.
//!
//! Reconstructs an interaction potential from a finite set of scattering
//! phase shifts at a single energy. Three solver variants are provided:
//! the general method for arbitrary channel sets, the semi-analytic
//! (matrix-inversion-free) method for parity-pure channel sets, and the
//! parity-split approximation that sums independent even and odd
//! reconstructions. A Numerov forward solver closes the loop by
//! recomputing phase shifts from any reconstructed potential.
//!
//! Everything works in the dimensionless variables x = k r and
//! q(x) = V(x/k) / E; [`reconstruct::to_physical`] converts back to
//! (r in fm, V in MeV).

pub mod error;
pub mod forward;
pub mod generalct;
pub mod linalg;
pub mod newton;
pub mod reconstruct;
pub mod semianalytic;
pub mod specfun;
pub mod types;

pub use error::CtError;
pub use num_complex::Complex64;
