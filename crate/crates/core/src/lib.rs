//! Lyapunov-control guidance for low-thrust orbit transfers.
//!
//! The control law steers full thrust along `-dV/dv` for the quadratic CLF
//! `V = 1/2 w^T K w`, where `w` measures the distance to the target orbit.
//! `K` is either diagonal or a full symmetric positive-definite matrix built
//! from eigenvalues and hyperspherical rotation angles, and its parameters are
//! tuned by particle swarm optimization to minimize time of flight.
//!
//! Modules, bottom up:
//!
//! - [`spdparam`]: rotations and SPD matrices from angles and eigenvalues
//! - [`diffnum`]: dual numbers for exact CLF gradients
//! - [`astrodyn`]: canonical units, element conversions, error vectors
//! - [`guidance`]: CLF value, gradient, time derivative and steering law
//! - [`propagate`]: adaptive integration with insertion event detection
//! - [`optimize`]: particle swarm over the weighting-matrix parameters
//! - [`bench`]: the benchmark transfers, campaigns and reports
//! - [`cli`]: the `clftraj` command line
//!
//! Runnable programs for each capability live in `examples/`.

pub mod astrodyn;
pub mod bench;
pub mod cli;
pub mod diffnum;
pub mod error;
pub mod guidance;
pub mod optimize;
pub mod propagate;
pub mod spdparam;
pub mod validate;

pub use error::{Error, Result};
