//! Simulation and statistical verification of stabilizing spatial
//! functionals: random geometric graphs over Poisson and binomial point
//! processes, lattice site percolation, stabilization radii, limiting
//! covariance estimation and white-noise central limit diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dsu;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod graphs;
pub mod harness;
pub mod percolation;
pub mod point_process;
pub mod rng;
pub mod spatial;
pub mod stabilization;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};

/// Format a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
