//! Stabilization radii and limiting covariance ingredients.
//!
//! Observation windows are the cubes `Q_W = [-W, W)^d`. Samples on growing
//! windows are nested: the process on `Q_W` is the union of independently
//! seeded shells `Q_{W_k} \ Q_{W_{k-1}}`, so enlarging a window only adds
//! points and never redraws existing ones.

mod limits;
mod radius;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::point_process::{attach_marks, sample_poisson, PointConfiguration};
use crate::rng::derive_seed;

pub use limits::{
    add_one_costs, estimate_delta_infinity, estimate_sigma_continuum, estimate_sigma_lattice, estimate_tau,
    CovarianceIngredients, DeltaInfinity, TauEstimate, WindowStep,
};
pub use radius::{
    heuristic_radius, online_nng_radius, probe_stability, Counterexample, HeuristicRadius, ProbeReport,
    StabilizationRadius,
};

/// Geometric sequence of window half-widths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub initial: f64,
    #[serde(default = "two")]
    pub factor: f64,
    pub max: f64,
    #[serde(default = "tol")]
    pub tolerance: f64,
}

fn two() -> f64 {
    2.0
}

fn tol() -> f64 {
    1e-9
}

impl WindowSchedule {
    pub fn new(initial: f64, max: f64) -> Self {
        WindowSchedule { initial, factor: 2.0, max, tolerance: 1e-9 }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.initial > 0.0 && self.factor > 1.0 && self.tolerance > 0.0 && self.max >= self.initial) {
            return Err(Error::param("window schedule needs initial > 0, factor > 1, tolerance > 0, max >= initial"));
        }
        Ok(())
    }

    /// `W0, W0 f, W0 f^2, ...` up to `max`, ending exactly at `max`.
    pub fn windows(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut out = vec![self.initial];
        loop {
            let next = out.last().unwrap() * self.factor;
            if next >= self.max * (1.0 - 1e-12) {
                break;
            }
            out.push(next);
        }
        if *out.last().unwrap() < self.max * (1.0 - 1e-12) {
            out.push(self.max);
        }
        Ok(out)
    }
}

/// Which part of each cube a nested sampler covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum HalfSpace {
    Full,
    /// `x_1 < 0`.
    Negative,
    /// `x_1 >= 0`.
    NonNegative,
}

pub(crate) fn cube_part(dim: usize, w: f64, half: HalfSpace) -> Result<Region> {
    let mut lo = vec![-w; dim];
    let mut hi = vec![w; dim];
    match half {
        HalfSpace::Full => {}
        HalfSpace::Negative => hi[0] = 0.0,
        HalfSpace::NonNegative => lo[0] = 0.0,
    }
    Region::cuboid(&lo, &hi)
}

/// Poisson points (and marks) on nested windows, drawn shell by shell.
pub(crate) struct NestedPoisson {
    dim: usize,
    lambda: f64,
    windows: Vec<f64>,
    half: HalfSpace,
    seed: u64,
    coords: Vec<f64>,
    marks: Vec<f64>,
    ends: Vec<usize>,
}

impl NestedPoisson {
    pub(crate) fn new(dim: usize, lambda: f64, windows: &[f64], half: HalfSpace, seed: u64) -> Self {
        NestedPoisson {
            dim,
            lambda,
            windows: windows.to_vec(),
            half,
            seed,
            coords: Vec::new(),
            marks: Vec::new(),
            ends: Vec::new(),
        }
    }

    /// Points and marks on window `k`.
    pub(crate) fn upto(&mut self, k: usize) -> Result<(PointConfiguration, Vec<f64>)> {
        while self.ends.len() <= k {
            let j = self.ends.len();
            let outer = cube_part(self.dim, self.windows[j], self.half)?;
            let shell = if j == 0 {
                outer
            } else {
                outer.difference(&cube_part(self.dim, self.windows[j - 1], self.half)?)?
            };
            let s = derive_seed(self.seed, &[j as u64]);
            let (p, mk) = attach_marks(sample_poisson(self.lambda, &shell, s)?, s).into_parts();
            self.coords.extend_from_slice(p.coords());
            self.marks.extend(mk);
            self.ends.push(self.marks.len());
        }
        let n = self.ends[k];
        Ok((PointConfiguration::from_flat(self.dim, self.coords[..n * self.dim].to_vec())?, self.marks[..n].to_vec()))
    }
}
