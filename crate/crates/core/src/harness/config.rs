use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::FunctionalSpec;
use crate::geometry::Region;
use crate::percolation::LatticeFunctional;
use crate::stabilization::WindowSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Poisson process of intensity `lambda` on `t B_0`.
    Poisson,
    /// `n` uniform points on `t_n B_0` with `lambda t_n^d |B_0| = n`.
    Binomial,
    /// `n` uniform points on `B_0`, rescaled by homogeneity.
    FixedN,
    /// Site percolation on the discretization of `t B_0`.
    Lattice,
}

/// Settings for the nested estimator of the limiting covariance ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaSettings {
    pub schedule: WindowSchedule,
    pub outer_n: usize,
    pub inner_m: usize,
}

impl Default for SigmaSettings {
    fn default() -> Self {
        SigmaSettings { schedule: WindowSchedule::new(4.0, 8.0), outer_n: 400, inner_m: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub b0: Region,
    pub regions: Vec<Region>,
    #[serde(default)]
    pub functionals: Vec<FunctionalSpec>,
    #[serde(default)]
    pub lattice_functionals: Vec<LatticeFunctional>,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub p: f64,
    /// Scales `t` (poisson and lattice modes).
    #[serde(default)]
    pub scales: Vec<f64>,
    /// Sample sizes `n` (binomial and fixed-n modes).
    #[serde(default)]
    pub sizes: Vec<usize>,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default = "alpha")]
    pub alpha: f64,
    #[serde(default = "projections")]
    pub projections: usize,
    /// Homogeneity order for fixed-n mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaSettings>,
}

fn one() -> f64 {
    1.0
}

fn alpha() -> f64 {
    0.01
}

fn projections() -> usize {
    16
}

impl ExperimentConfig {
    /// Minimal configuration; remaining fields take their defaults.
    pub fn new(mode: Mode, b0: Region, regions: Vec<Region>, replicates: usize, seed: u64) -> Self {
        ExperimentConfig {
            mode,
            b0,
            regions,
            functionals: Vec::new(),
            lattice_functionals: Vec::new(),
            lambda: 1.0,
            p: 0.5,
            scales: Vec::new(),
            sizes: Vec::new(),
            replicates,
            seed,
            threads: None,
            alpha: 0.01,
            projections: 16,
            gamma: None,
            sigma: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.b0.dim()
    }

    pub fn columns(&self) -> usize {
        self.regions.len()
    }

    /// Functional for each column, broadcasting a single functional.
    pub fn column_functionals(&self) -> Vec<FunctionalSpec> {
        if self.functionals.len() == 1 {
            vec![self.functionals[0].clone(); self.columns()]
        } else {
            self.functionals.clone()
        }
    }

    pub fn column_lattice_functionals(&self) -> Vec<LatticeFunctional> {
        if self.lattice_functionals.len() == 1 {
            vec![self.lattice_functionals[0].clone(); self.columns()]
        } else {
            self.lattice_functionals.clone()
        }
    }

    pub fn scale_count(&self) -> usize {
        match self.mode {
            Mode::Poisson | Mode::Lattice => self.scales.len(),
            Mode::Binomial | Mode::FixedN => self.sizes.len(),
        }
    }

    /// `t_n = (n / (lambda |B_0|))^(1/d)`.
    pub fn t_n(&self, n: usize) -> f64 {
        (n as f64 / (self.lambda * self.b0.measure())).powf(1.0 / self.dim() as f64)
    }

    /// Scale parameter (`t` or `n`) at index `k`.
    pub fn scale_value(&self, k: usize) -> f64 {
        match self.mode {
            Mode::Poisson | Mode::Lattice => self.scales[k],
            Mode::Binomial | Mode::FixedN => self.sizes[k] as f64,
        }
    }

    /// Divisor turning a sample covariance into its normalized limit.
    pub fn normalization(&self, k: usize) -> f64 {
        let d = self.dim() as f64;
        match self.mode {
            Mode::Poisson | Mode::Lattice => self.scales[k].powf(d),
            Mode::Binomial => self.sizes[k] as f64,
            Mode::FixedN => {
                let gamma = self.gamma.unwrap_or(0.0);
                (self.sizes[k] as f64).powf(1.0 - 2.0 * gamma / d)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::param(m.to_string()));
        if self.regions.is_empty() {
            return bad("at least one region required");
        }
        if !(self.b0.measure() > 0.0) {
            return bad("B_0 must have positive measure");
        }
        for (i, a) in self.regions.iter().enumerate() {
            if a.dim() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), found: a.dim() });
            }
            if !a.is_subset_of(&self.b0)? {
                return Err(Error::param(format!("region {i} is not contained in B_0")));
            }
        }
        if self.replicates < 2 {
            return bad("at least two replicates required");
        }
        if self.scale_count() == 0 {
            return bad("no scales or sizes given for this mode");
        }
        if self.threads == Some(0) {
            return bad("threads must be positive");
        }
        match self.mode {
            Mode::Lattice => {
                let n = self.lattice_functionals.len();
                if n != 1 && n != self.columns() {
                    return Err(Error::input("lattice functionals must be one or one per region"));
                }
                if !(0.0..=1.0).contains(&self.p) {
                    return bad("occupation probability outside [0, 1]");
                }
                for f in &self.lattice_functionals {
                    f.validate()?;
                }
                if self.scales.iter().any(|&t| !(t > 0.0)) {
                    return bad("scales must be positive");
                }
            }
            _ => {
                let n = self.functionals.len();
                if n != 1 && n != self.columns() {
                    return Err(Error::input("functionals must be one or one per region"));
                }
                for f in &self.functionals {
                    f.validate()?;
                }
                if !(self.lambda > 0.0) {
                    return bad("intensity must be positive");
                }
                if self.mode == Mode::Poisson && self.scales.iter().any(|&t| !(t > 0.0)) {
                    return bad("scales must be positive");
                }
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        Ok(())
    }

    /// Copy restricted to the single scale index `k`.
    pub fn at_scale(&self, k: usize) -> ExperimentConfig {
        let mut c = self.clone();
        match self.mode {
            Mode::Poisson | Mode::Lattice => c.scales = vec![self.scales[k]],
            Mode::Binomial | Mode::FixedN => c.sizes = vec![self.sizes[k]],
        }
        c
    }
}
