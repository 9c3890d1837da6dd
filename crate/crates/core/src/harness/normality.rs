use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::replicates::SampleMatrix;
use crate::error::{Error, Result};
use crate::geometry::random_direction;
use crate::rng::stream;

/// Bootstrap resamples for the null distribution of the KS statistic.
pub const BOOTSTRAP_RESAMPLES: usize = 999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub direction: Vec<f64>,
    /// KS distance to the fitted normal; absent for degenerate projections.
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n: usize,
    pub alpha: f64,
    pub resamples: usize,
    pub projections: Vec<ProjectionResult>,
    /// Projections with `p > alpha`.
    pub passed_count: usize,
    pub tested_count: usize,
    /// `min(1, m * min p)` over the `m` tested projections.
    pub combined_p: Option<f64>,
    pub combined_passed: bool,
    pub degenerate: bool,
    pub notes: Vec<String>,
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// KS distance between the standardized sample and `N(0, 1)`; `None` when
/// the sample has (numerically) zero spread.
pub fn ks_normal_statistic(x: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(var.sqrt() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        return None;
    }
    let sd = var.sqrt();
    let mut z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let nf = n as f64;
    Some(z.iter().enumerate().fold(0.0f64, |d, (i, &zi)| {
        let f = std_normal_cdf(zi);
        d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf)
    }))
}

/// Null distribution of the estimated-parameter KS statistic at size `n`.
pub fn lilliefors_null(n: usize, resamples: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, &[n as u64, resamples as u64, 0x4b53]);
    let mut buf = vec![0.0; n];
    let mut out: Vec<f64> = (0..resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = rng.sample(StandardNormal);
            }
            ks_normal_statistic(&buf).unwrap_or(0.0)
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Analytic tail approximation of the Lilliefors p-value; accurate below 0.1.
fn dallal_wilkinson(d: f64, n: usize) -> f64 {
    let nf = n as f64;
    let m = nf + 2.78019;
    (-7.01256 * d * d * m + 2.99587 * d * m.sqrt() - 0.122119 + 0.974598 / nf.sqrt() + 1.67997 / nf).exp()
}

/// `(1 + #{null >= d}) / (B + 1)`; beyond the bootstrap maximum the analytic
/// tail is used so that small p-values stay resolvable.
pub fn bootstrap_p_value(d: f64, null_sorted: &[f64], n: usize) -> f64 {
    let exceed = null_sorted.len() - null_sorted.partition_point(|&v| v < d);
    let p = (1 + exceed) as f64 / (null_sorted.len() + 1) as f64;
    if exceed == 0 {
        p.min(dallal_wilkinson(d, n))
    } else {
        p
    }
}

/// Cramér–Wold check: KS tests of `n_projections` random projections with a
/// parametric bootstrap null and a Bonferroni combination.
pub fn test_normality(m: &SampleMatrix, n_projections: usize, seed: u64, alpha: f64) -> Result<NormalityReport> {
    let n = m.rows();
    if n < 100 {
        return Err(Error::param("normality test needs at least 100 replicates"));
    }
    if n_projections == 0 {
        return Err(Error::param("at least one projection required"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha must lie in (0, 1)"));
    }
    let k = m.columns();
    let mut rng = stream(seed, &[0x5052]);
    let mut notes = Vec::new();
    let mut null: Option<Vec<f64>> = None;
    let mut projections = Vec::with_capacity(n_projections);
    for _ in 0..n_projections {
        let b = random_direction(&mut rng, k);
        let y: Vec<f64> = m.values.iter().map(|r| r.iter().zip(&b).map(|(x, c)| x * c).sum()).collect();
        match ks_normal_statistic(&y) {
            None => projections.push(ProjectionResult { direction: b, statistic: None, p_value: None, degenerate: true }),
            Some(d) => {
                let null = null.get_or_insert_with(|| lilliefors_null(n, BOOTSTRAP_RESAMPLES, seed));
                let p = bootstrap_p_value(d, null, n);
                projections.push(ProjectionResult { direction: b, statistic: Some(d), p_value: Some(p), degenerate: false });
            }
        }
    }
    let ps: Vec<f64> = projections.iter().filter_map(|p| p.p_value).collect();
    let skipped = n_projections - ps.len();
    if skipped > 0 {
        notes.push(format!("{skipped} zero-variance projection(s) skipped"));
    }
    let combined_p = (!ps.is_empty()).then(|| (ps.iter().copied().fold(1.0, f64::min) * ps.len() as f64).min(1.0));
    Ok(NormalityReport {
        n,
        alpha,
        resamples: BOOTSTRAP_RESAMPLES,
        passed_count: ps.iter().filter(|&&p| p > alpha).count(),
        tested_count: ps.len(),
        combined_passed: combined_p.is_some_and(|p| p > alpha),
        combined_p,
        degenerate: ps.is_empty(),
        projections,
        notes,
    })
}
