//! Deterministic discontinuous Galerkin solver for the bipolar semiclassical
//! Boltzmann transport equation in monolayer graphene.
//!
//! The distribution of each band is piecewise linear in `x` and piecewise
//! constant on a polar `(ε, θ)` mesh. Free streaming uses an upwind flux,
//! the field-driven drift uses a MinMod (UNO) reconstruction, and the
//! electron–phonon and impurity collision operators are precomputed as
//! cell-pair tables. A Zhang–Shu limiter keeps the reconstruction in `[0, 1]`
//! and SSP-RK3 advances in time. In coupled mode the longitudinal field comes
//! from a 2D finite-difference Poisson solve on the device cross-section.
//!
//! Internal units: energy in eV, length in nm, time in ps, field in V/nm.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod banded;
pub mod collision;
pub mod convergence;
pub mod driver;
mod error;
pub mod limiter;
pub mod mesh;
pub mod moments;
pub mod physics;
pub mod poisson;
pub mod scenario;
pub mod state;
pub mod stepping;
pub mod transport;

pub use error::{Error, Result};
pub use state::{Band, SolutionState};
