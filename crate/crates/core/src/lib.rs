//! Reactive receiver model for diffusive molecular communication.
//!
//! A point transmitter releases `N_A` molecules at distance `r0` from the
//! centre of a spherical receiver whose surface carries reversible receptors.
//! Released molecules diffuse, may degrade in the bulk, and bind to or unbind
//! from the surface. This crate provides:
//!
//! * [`units`]: dimensional parameters and their non-dimensional form
//! * [`specfun`]: the scaled complementary error function and friends
//! * [`analytic`]: closed-form Green's function and channel impulse response
//! * [`homogenization`]: finite receptor patches mapped to a uniform surface
//! * [`oracle`]: Laplace-domain solution plus numerical inversion
//! * [`simulator`]: particle-based Monte Carlo reference
//!
//! Everything below works in non-dimensional units (primed quantities),
//! with the receiver surface at `r' = 1`.

pub mod analytic;
pub mod homogenization;
pub mod oracle;
pub mod quad;
pub mod simulator;
pub mod specfun;
pub mod units;


pub use units::{DimensionlessParams, SystemParams};
