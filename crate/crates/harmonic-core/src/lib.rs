//! Boundary-driven harmonic process toolkit.
//!
//! The harmonic process is a one-dimensional lattice gas of unbounded
//! occupation numbers, coupled at its two ends to particle reservoirs of
//! densities `rho_left <= rho_right`. Jump rates involve shifted harmonic
//! numbers, the equilibrium marginals are Negative Binomials with shape
//! `2s`, and the non-equilibrium steady state is a mixture of inhomogeneous
//! Negative-Binomial product measures over ordered random chemical
//! potentials (a Dirichlet mixing law).
//!
//! The crate provides:
//!
//! * [`model`] — parameters, jump rates, elementary distributions and the
//!   truncated Markov generator;
//! * [`sim`] — an event-driven (Gillespie) simulator with exact jump-size
//!   sampling and reproducible replica statistics;
//! * [`ness`] — the exact steady state: factorial moments, probability
//!   reconstruction, the mixture representation and its sampler;
//! * [`mgf`] — all representations of the steady-state moment generating
//!   function, including the finite-volume constant-field machinery;
//! * [`macroscale`] — pressure, density large-deviation rate function and
//!   the additivity principle.

pub mod error;
pub mod macroscale;
pub mod mgf;
pub mod model;
pub mod ness;
pub mod numerics;
pub mod sim;
pub mod verify;

pub use error::Error;
pub use model::{Configuration, ModelParams};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
