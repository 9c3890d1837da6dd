use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::replicates::{run_replicates, SampleMatrix};
use crate::error::{Error, Result};
use crate::geometry::Region;

/// Normalized sample covariance with jackknife standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub labels: Vec<String>,
    pub n: usize,
    /// The raw covariance is divided by this.
    pub normalization: f64,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    pub se: Vec<Vec<f64>>,
    /// Leave-one-out normalized covariances, one per replicate.
    #[serde(skip)]
    pub leave_one_out: Vec<Vec<Vec<f64>>>,
}

/// `Cov / normalization` with jackknife errors over the rows of `m`.
pub fn estimate_covariance(m: &SampleMatrix, normalization: f64) -> Result<CovarianceEstimate> {
    let n = m.rows();
    let k = m.columns();
    if n < 2 {
        return Err(Error::param("covariance needs at least two replicates"));
    }
    if !(normalization > 0.0) {
        return Err(Error::param("normalization must be positive"));
    }
    let mean: Vec<f64> = (0..k).map(|j| m.values.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let centered: Vec<Vec<f64>> = m.values.iter().map(|r| r.iter().zip(&mean).map(|(x, mu)| x - mu).collect()).collect();
    let mut s2 = vec![vec![0.0; k]; k];
    for r in &centered {
        for i in 0..k {
            for j in i..k {
                s2[i][j] += r[i] * r[j];
            }
        }
    }
    let mut cov = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            cov[i][j] = s2[i][j] / ((n - 1) as f64 * normalization);
            cov[j][i] = cov[i][j];
        }
    }
    let mut loo = Vec::new();
    let mut se = vec![vec![0.0; k]; k];
    if n >= 3 {
        let nf = n as f64;
        loo = centered
            .iter()
            .map(|x| {
                // Row sums of centered data are zero, so the leave-one-out mean is -x / (n - 1).
                let mut c = vec![vec![0.0; k]; k];
                for i in 0..k {
                    for j in i..k {
                        let s = s2[i][j] - x[i] * x[j] - x[i] * x[j] / (nf - 1.0);
                        c[i][j] = s / ((nf - 2.0) * normalization);
                        c[j][i] = c[i][j];
                    }
                }
                c
            })
            .collect();
        for i in 0..k {
            for j in i..k {
                se[i][j] = jackknife(&loo, |c| c[i][j]);
                se[j][i] = se[i][j];
            }
        }
    }
    Ok(CovarianceEstimate { labels: m.labels.clone(), n, normalization, mean, cov, se, leave_one_out: loo })
}

/// `sqrt((n-1)/n * sum (g_r - mean g)^2)` over leave-one-out values.
pub(crate) fn jackknife<F: Fn(&[Vec<f64>]) -> f64>(loo: &[Vec<Vec<f64>>], g: F) -> f64 {
    let n = loo.len() as f64;
    let vals: Vec<f64> = loo.iter().map(|c| g(c)).collect();
    let mean = vals.iter().sum::<f64>() / n;
    ((n - 1.0) / n * vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()).sqrt()
}

impl CovarianceEstimate {
    pub fn dim(&self) -> usize {
        self.cov.len()
    }

    /// Jackknife standard error of any scalar function of the matrix, when
    /// leave-one-out data are available.
    pub fn jackknife_se<F: Fn(&[Vec<f64>]) -> f64>(&self, g: F) -> Option<f64> {
        (!self.leave_one_out.is_empty()).then(|| jackknife(&self.leave_one_out, g))
    }

    pub fn is_symmetric(&self) -> bool {
        let k = self.dim();
        (0..k).all(|i| (0..k).all(|j| self.cov[i][j] == self.cov[j][i]))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eig(&self.cov)
    }

    /// `(cov_ij - reference_ij) / sqrt(se_ij^2 + reference_se_ij^2)`.
    pub fn z_scores(&self, reference: &[Vec<f64>], reference_se: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let k = self.dim();
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| z_score(self.cov[i][j] - reference[i][j], self.se[i][j].hypot(reference_se[i][j])))
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn min_eig(c: &[Vec<f64>]) -> f64 {
    let k = c.len();
    if k == 0 {
        return 0.0;
    }
    let m = DMatrix::from_fn(k, k, |i, j| c[i][j]);
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// `diff / se`, with zero for an exact match and an error sentinel otherwise.
pub(crate) fn z_score(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::MAX.copysign(diff)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub intersection: f64,
    pub disjoint: bool,
    /// `cov_ij / cov_ll`; for disjoint pairs the raw `cov_ij`.
    pub statistic: f64,
    pub expected: f64,
    pub se: f64,
    pub residual: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionalityReport {
    pub reference: usize,
    pub pairs: Vec<PairCheck>,
    pub max_abs_z: f64,
    pub passed: bool,
}

/// Checks `cov_ij / cov_ll = |A_i ∩ A_j| / |A_l|` (and `cov_ij = 0` for
/// disjoint pairs) with reference index `l = 0`.
pub fn white_noise_check(cov: &CovarianceEstimate, regions: &[Region], b0: &Region) -> Result<ProportionalityReport> {
    white_noise_check_with(cov, regions, b0, 0)
}

pub fn white_noise_check_with(
    cov: &CovarianceEstimate,
    regions: &[Region],
    b0: &Region,
    reference: usize,
) -> Result<ProportionalityReport> {
    let k = cov.dim();
    if k < 2 {
        return Err(Error::input("proportionality check needs at least two regions"));
    }
    if regions.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: regions.len() });
    }
    if reference >= k {
        return Err(Error::param("reference index out of range"));
    }
    for a in regions {
        if !a.is_subset_of(b0)? {
            return Err(Error::input("regions must lie in B_0"));
        }
    }
    let l = reference;
    let c_ll = cov.cov[l][l];
    let a_l = regions[l].measure();
    if !(c_ll > 0.0) || !(a_l > 0.0) {
        return Err(Error::input("degenerate reference variance"));
    }
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i..k {
            if i == l && j == l {
                continue;
            }
            let inter = regions[i].intersect(&regions[j])?.measure();
            let pc = if inter == 0.0 {
                let s = cov.cov[i][j];
                PairCheck {
                    i,
                    j,
                    intersection: 0.0,
                    disjoint: true,
                    statistic: s,
                    expected: 0.0,
                    se: cov.se[i][j],
                    residual: s,
                    z: z_score(s, cov.se[i][j]),
                }
            } else {
                let r = cov.cov[i][j] / c_ll;
                let expected = inter / a_l;
                let se = cov.jackknife_se(|c| c[i][j] / c[l][l]).unwrap_or(0.0);
                PairCheck {
                    i,
                    j,
                    intersection: inter,
                    disjoint: false,
                    statistic: r,
                    expected,
                    se,
                    residual: r - expected,
                    z: z_score(r - expected, se),
                }
            };
            pairs.push(pc);
        }
    }
    let max_abs_z = pairs.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
    Ok(ProportionalityReport { reference, pairs, max_abs_z, passed: max_abs_z <= 3.0 })
}

/// Normalized covariance at each scale with a stabilization verdict on the
/// last two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub scales: Vec<f64>,
    pub estimates: Vec<CovarianceEstimate>,
    /// Entrywise z-scores between the last two estimates.
    pub last_pair_z: Vec<Vec<f64>>,
    pub stabilized: bool,
    pub notes: Vec<String>,
}

pub fn scaling_report(scales: Vec<f64>, estimates: Vec<CovarianceEstimate>) -> Result<ScalingReport> {
    if estimates.len() < 2 || scales.len() != estimates.len() {
        return Err(Error::param("scaling diagnostic needs at least two scales"));
    }
    let mut notes = Vec::new();
    if estimates.len() < 3 {
        notes.push("fewer than three scales; trend is unconstrained".to_string());
    }
    let a = &estimates[estimates.len() - 2];
    let b = &estimates[estimates.len() - 1];
    let last_pair_z = b.z_scores(&a.cov, &a.se);
    let stabilized = last_pair_z.iter().flatten().all(|z| z.abs() <= 3.0);
    Ok(ScalingReport { scales, estimates, last_pair_z, stabilized, notes })
}

/// Runs replicates at every scale of `cfg` and reports the normalized
/// covariance sequence.
pub fn scaling_diagnostic(cfg: &ExperimentConfig) -> Result<(ScalingReport, Vec<SampleMatrix>)> {
    cfg.validate()?;
    if cfg.scale_count() < 2 {
        return Err(Error::param("scaling diagnostic needs at least two scales"));
    }
    let mut mats = Vec::new();
    let mut ests = Vec::new();
    for k in 0..cfg.scale_count() {
        let m = run_replicates(cfg, k)?;
        ests.push(estimate_covariance(&m, cfg.normalization(k))?);
        mats.push(m);
    }
    let scales = (0..cfg.scale_count()).map(|k| cfg.scale_value(k)).collect();
    Ok((scaling_report(scales, ests)?, mats))
}
