use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Mode};
use crate::error::{Error, Result};
use crate::fmt17;
use crate::functionals::{evaluate_many, FunctionalSpec};
use crate::geometry::Region;
use crate::percolation::{sample_lattice, LatticeFunctional, LatticeWindow};
use crate::point_process::{attach_marks, sample_binomial, sample_poisson};
use crate::rng::derive_seed;

/// `N x k` functional values, one row per independent realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMatrix {
    pub mode: Mode,
    /// `t` for poisson and lattice modes, `n` otherwise.
    pub scale: f64,
    pub labels: Vec<String>,
    pub seeds: Vec<u64>,
    pub values: Vec<Vec<f64>>,
}

impl SampleMatrix {
    pub fn from_rows(mode: Mode, scale: f64, labels: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        let k = labels.len();
        if values.iter().any(|r| r.len() != k) {
            return Err(Error::input("every row needs one value per label"));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::input("sample values must be finite"));
        }
        let seeds = (0..values.len() as u64).collect();
        Ok(SampleMatrix { mode, scale, labels, seeds, values })
    }

    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn columns(&self) -> usize {
        self.labels.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    /// Header `replicate,seed,<labels...>` then one line per row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["replicate".to_string(), "seed".to_string()];
        header.extend(self.labels.iter().cloned());
        out.write_record(&header)?;
        for (r, row) in self.values.iter().enumerate() {
            let mut rec = vec![r.to_string(), self.seeds[r].to_string()];
            rec.extend(row.iter().map(|&v| fmt17(v)));
            out.write_record(&rec)?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Runs `f(0..n)` serially when `threads == Some(1)`, otherwise on a pool of
/// the requested size (or the global pool). Results are merged by index.
pub(crate) fn par_map<T, F>(n: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    match threads {
        Some(1) => (0..n).map(&f).collect(),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build()?;
            pool.install(|| (0..n).into_par_iter().map(&f).collect())
        }
        None => (0..n).into_par_iter().map(&f).collect(),
    }
}

/// Row `r` at scale index `s` uses seed `derive_seed(master, [s, r])`; every
/// column of a row is evaluated on the same realization.
pub fn run_replicates(cfg: &ExperimentConfig, scale_index: usize) -> Result<SampleMatrix> {
    cfg.validate()?;
    if scale_index >= cfg.scale_count() {
        return Err(Error::param(format!("scale index {scale_index} out of range")));
    }
    let seeds: Vec<u64> =
        (0..cfg.replicates as u64).map(|r| derive_seed(cfg.seed, &[scale_index as u64, r])).collect();
    let scale = cfg.scale_value(scale_index);
    let (labels, values) = match cfg.mode {
        Mode::Lattice => lattice_rows(cfg, scale, &seeds)?,
        _ => continuum_rows(cfg, scale_index, &seeds)?,
    };
    Ok(SampleMatrix { mode: cfg.mode, scale, labels, seeds, values })
}

fn continuum_rows(cfg: &ExperimentConfig, k: usize, seeds: &[u64]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let specs = cfg.column_functionals();
    let labels = specs.iter().map(FunctionalSpec::label).collect();
    let t = match cfg.mode {
        Mode::Poisson => cfg.scales[k],
        Mode::Binomial => cfg.t_n(cfg.sizes[k]),
        _ => 1.0,
    };
    let window = cfg.b0.scale(t)?;
    let regions: Vec<Region> = cfg.regions.iter().map(|a| a.scale(t)).collect::<Result<_>>()?;
    let marks = specs.iter().any(FunctionalSpec::needs_marks);
    let values = par_map(seeds.len(), cfg.threads, |r| {
        let s = seeds[r];
        let pts = match cfg.mode {
            Mode::Poisson => sample_poisson(cfg.lambda, &window, s)?,
            _ => sample_binomial(cfg.sizes[k], &window, s)?,
        };
        if marks {
            let (pts, mk) = attach_marks(pts, derive_seed(s, &[1])).into_parts();
            evaluate_many(&specs, &pts, Some(&mk), &regions)
        } else {
            evaluate_many(&specs, &pts, None, &regions)
        }
    })?;
    Ok((labels, values))
}

fn lattice_rows(cfg: &ExperimentConfig, t: f64, seeds: &[u64]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let fs = cfg.column_lattice_functionals();
    let labels = fs.iter().map(LatticeFunctional::label).collect();
    let window = LatticeWindow::scaled(&cfg.b0, t)?;
    let values = par_map(seeds.len(), cfg.threads, |r| {
        let x = sample_lattice(cfg.p, &window, seeds[r])?;
        fs.iter().zip(&cfg.regions).map(|(f, a)| f.evaluate(&x, a)).collect()
    })?;
    Ok((labels, values))
}
