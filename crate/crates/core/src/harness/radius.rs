use rand::Rng;
use serde::{Deserialize, Serialize};

use super::replicates::par_map;
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::graphs::GraphBuilder;
use crate::point_process::{attach_marks, sample_poisson};
use crate::rng::{derive_seed, stream};
use crate::stabilization::{heuristic_radius, online_nng_radius, probe_stability, ProbeReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabRadiusConfig {
    #[serde(default = "online")]
    pub builder: GraphBuilder,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "two")]
    pub dim: usize,
    /// Half-width `W` of the window `[-W, W)^d`.
    pub window: f64,
    pub configs: usize,
    pub probes: usize,
    #[serde(default)]
    pub seed: u64,
    /// For the on-line NNG: keep drawing until `configs` configurations
    /// have an exact cone radius whose ball leaves room for probes.
    #[serde(default = "yes")]
    pub require_exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

fn online() -> GraphBuilder {
    GraphBuilder::OnlineNng
}
fn one() -> f64 {
    1.0
}
fn two() -> usize {
    2
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEntry {
    pub config: u64,
    pub n_points: usize,
    pub radius: f64,
    pub exact: bool,
    pub heuristic: bool,
    pub report: ProbeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabRadiusReport {
    pub builder: GraphBuilder,
    pub attempts: usize,
    pub entries: Vec<RadiusEntry>,
    /// Exact radii whose probes found a counterexample.
    pub exact_failures: usize,
    pub passed: bool,
}

const MAX_ATTEMPTS_PER_CONFIG: usize = 50;

/// Poisson configurations on `[-W, W)^d` plus a point at the origin; radius
/// from the cone construction (on-line NNG) or probe doubling (other graphs),
/// then adversarial probes outside it.
pub fn stab_radius_experiment(cfg: &StabRadiusConfig) -> Result<StabRadiusReport> {
    if !(cfg.lambda > 0.0 && cfg.window > 0.0) || cfg.configs == 0 || cfg.dim == 0 {
        return Err(Error::param("need lambda > 0, window > 0, dim > 0 and at least one configuration"));
    }
    let window = Region::centered_cube(cfg.dim, cfg.window)?;
    let origin = vec![0.0; cfg.dim];
    let online = cfg.builder == GraphBuilder::OnlineNng;
    let run = |c: usize| -> Result<RadiusEntry> {
        let s = derive_seed(cfg.seed, &[c as u64]);
        let (mut pts, mut marks) = attach_marks(sample_poisson(cfg.lambda, &window, s)?, s).into_parts();
        pts.push(&origin)?;
        marks.push(stream(s, &[0x4f52]).random());
        let idx = pts.len() - 1;
        let probe_seed = derive_seed(s, &[0x5052]);
        if online {
            let r = online_nng_radius(&pts, &marks, idx, &window)?;
            let report = probe_stability(&cfg.builder, &pts, Some(&marks), idx, r.radius, &window, cfg.probes, probe_seed)?;
            Ok(RadiusEntry { config: c as u64, n_points: pts.len(), radius: r.radius, exact: r.exact, heuristic: false, report })
        } else {
            let m = cfg.builder.needs_marks().then_some(marks.as_slice());
            let h = heuristic_radius(&cfg.builder, &pts, m, idx, &window, 1.0, cfg.probes, probe_seed)?;
            Ok(RadiusEntry {
                config: c as u64,
                n_points: pts.len(),
                radius: h.radius,
                exact: false,
                heuristic: h.heuristic,
                report: h.report,
            })
        }
    };
    let mut entries = Vec::new();
    let mut attempts = 0;
    let keep_exact = online && cfg.require_exact;
    while entries.len() < cfg.configs {
        if attempts >= cfg.configs * MAX_ATTEMPTS_PER_CONFIG {
            return Err(Error::param("too few configurations with an exact radius; enlarge the window"));
        }
        let batch = cfg.configs - entries.len();
        let found = par_map(batch, cfg.threads, |i| run(attempts + i))?;
        attempts += batch;
        entries.extend(found.into_iter().filter(|e| !keep_exact || (e.exact && !e.report.vacuous)));
    }
    let exact_failures = entries.iter().filter(|e| e.exact && !e.report.passed).count();
    let passed = entries.iter().all(|e| e.report.passed);
    Ok(StabRadiusReport { builder: cfg.builder, attempts, entries, exact_failures, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn online_exact_radii_survive_probes() {
        let cfg = StabRadiusConfig {
            builder: GraphBuilder::OnlineNng,
            lambda: 1.0,
            dim: 2,
            window: 8.0,
            configs: 4,
            probes: 12,
            seed: 5,
            require_exact: true,
            threads: None,
        };
        let r = stab_radius_experiment(&cfg).unwrap();
        assert_eq!(r.entries.len(), 4);
        assert!(r.entries.iter().all(|e| e.exact && e.report.passed && e.report.probes_run == 12));
        assert_eq!(r, stab_radius_experiment(&StabRadiusConfig { threads: Some(1), ..cfg }).unwrap());
    }

    #[test]
    fn knng_uses_heuristic_radius() {
        let cfg = StabRadiusConfig {
            builder: GraphBuilder::Knng { k: 1 },
            lambda: 1.0,
            dim: 2,
            window: 5.0,
            configs: 2,
            probes: 8,
            seed: 2,
            require_exact: true,
            threads: Some(1),
        };
        let r = stab_radius_experiment(&cfg).unwrap();
        assert!(r.entries.iter().all(|e| e.heuristic && !e.exact));
    }
}
