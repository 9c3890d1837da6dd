//! Acceptance suite: each criterion prints one PASS/FAIL line with its
//! measured quantities and runtime against its budget.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use stabgeom::functionals::{homogeneity_check, Family, FunctionalSpec, Phi};
use stabgeom::geometry::{distance, random_direction, Cone, Region};
use stabgeom::graphs::{build_mst, edge_delta, GraphBuilder};
use stabgeom::harness::{
    empirical_process_experiment, estimate_covariance, run_replicates, stab_radius_experiment, test_normality,
    white_noise_check, ExperimentConfig, Mode, StabRadiusConfig,
};
use stabgeom::percolation::{resample_increment, sample_lattice, LatticeFunctional, LatticeWindow};
use stabgeom::point_process::{sample_binomial, PointConfiguration};
use stabgeom::rng::{derive_seed, stream};
use stabgeom::stabilization::{estimate_sigma_continuum, estimate_tau, WindowSchedule};

type Outcome = Result<String, String>;

fn unit() -> Region {
    Region::unit_cube(2)
}

fn strip(a: f64, b: f64) -> Region {
    Region::cuboid(&[a, 0.0], &[b, 1.0]).unwrap()
}

fn within(x: f64, target: f64, se: f64) -> bool {
    (x - target).abs() <= 3.0 * se
}

/// Minimum spanning tree weight by enumerating every labelled tree through
/// its Prüfer sequence.
fn exhaustive_mst(p: &PointConfiguration) -> f64 {
    let n = p.len();
    if n < 2 {
        return 0.0;
    }
    let d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| distance(p.point(i), p.point(j))).collect()).collect();
    if n == 2 {
        return d[0][1];
    }
    let len = n - 2;
    let mut seq = vec![0usize; len];
    let mut best = f64::INFINITY;
    loop {
        let mut degree = vec![1usize; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut total = 0.0;
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            total += d[leaf][s];
            degree[leaf] = 0;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        total += d[rest[0]][rest[1]];
        best = best.min(total);
        let mut i = 0;
        while i < len {
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            return best;
        }
    }
}

fn mst_oracle() -> Outcome {
    let mut rng = stream(101, &[]);
    let mut worst = 0.0f64;
    for c in 0..200u64 {
        let dim = if c % 2 == 0 { 2 } else { 3 };
        let n = rng.random_range(1..=8);
        let pts = sample_binomial(n, &Region::unit_cube(dim), derive_seed(101, &[c])).unwrap();
        let diff = (build_mst(&pts).total_length() - exhaustive_mst(&pts)).abs();
        worst = worst.max(diff);
        if diff > 1e-9 {
            return Err(format!("config {c} (n = {n}, d = {dim}) differs by {diff:e}"));
        }
    }
    Ok(format!("200 configurations, max |difference| = {worst:e}"))
}

fn lee_invariants() -> Outcome {
    let mut violations = 0;
    for trial in 0..1000u64 {
        let s = derive_seed(202, &[trial]);
        let pts = sample_binomial(50, &unit(), s).unwrap();
        let x: Vec<f64> = {
            let mut r = stream(s, &[1]);
            vec![r.random(), r.random()]
        };
        let d = edge_delta(&GraphBuilder::Mst, &pts, None, &x, None).unwrap();
        let incident = d.added.iter().all(|e| e.touches(d.inserted));
        let count = d.added.len() == d.removed.len() + 1;
        let twice = d.longest_removed() <= 2.0 * d.longest_added();
        if !(incident && count && twice) {
            violations += 1;
        }
    }
    if violations == 0 {
        Ok("1000 insertions, 0 violations".into())
    } else {
        Err(format!("{violations} violations"))
    }
}

fn percolation_bound() -> Outcome {
    let t = 30.0;
    let window = LatticeWindow::scaled(&unit(), t).unwrap();
    let sites = window.sites().sites().to_vec();
    let mut summary = Vec::new();
    for (pi, &p) in [0.3, 0.5927, 0.8].iter().enumerate() {
        let results: Vec<f64> = (0..10_000u64)
            .map(|trial| {
                let s = derive_seed(303, &[pi as u64, trial]);
                let cfg = sample_lattice(p, &window, s).unwrap();
                let site = &sites[stream(s, &[9]).random_range(0..sites.len())];
                resample_increment(&cfg, site, &LatticeFunctional::ClusterCount, &unit(), trial).unwrap()
            })
            .collect();
        let max = results.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let bad = results.iter().filter(|v| v.abs() > 3.0).count();
        if bad > 0 {
            return Err(format!("p = {p}: {bad} increments exceed 3 (max {max})"));
        }
        summary.push(format!("p = {p}: max |increment| = {max}"));
    }
    Ok(summary.join("; "))
}

fn online_exact() -> Outcome {
    let cfg = StabRadiusConfig {
        builder: GraphBuilder::OnlineNng,
        lambda: 1.0,
        dim: 2,
        window: 20.0,
        configs: 50,
        probes: 100,
        seed: 404,
        require_exact: true,
        threads: None,
    };
    let r = stab_radius_experiment(&cfg).map_err(|e| e.to_string())?;
    let full = r.entries.iter().filter(|e| e.exact && e.report.passed && e.report.probes_run == 100).count();
    let radius = r.entries.iter().map(|e| e.radius).fold(0.0, f64::max);
    let msg = format!(
        "{full}/50 exact configurations passed 100/100 probes ({} drawn, largest radius {radius:.3})",
        r.attempts
    );
    if full == 50 && r.exact_failures == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cone_lemma() -> Outcome {
    let mut rng = stream(505, &[]);
    let mut violations = 0;
    let mut checked = 0;
    while checked < 100_000 {
        let dim = 2 + checked % 2;
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
        let cone = Cone::new(x.clone(), random_direction(&mut rng, dim), PI / 6.0).unwrap();
        let mut draw = || -> Vec<f64> {
            loop {
                let u = random_direction(&mut rng, dim);
                let r = rng.random_range(0.0..3.0f64);
                let p: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + r * b).collect();
                if p != x && cone.contains(&p).unwrap() {
                    return p;
                }
            }
        };
        let y = draw();
        let z = draw();
        if distance(&z, &y) >= distance(&z, &x).max(distance(&y, &x)) {
            violations += 1;
        }
        checked += 1;
    }
    if violations == 0 {
        Ok("100000 triples (d = 2, 3), 0 violations".into())
    } else {
        Err(format!("{violations} violations"))
    }
}

fn point_count_calibration() -> Outcome {
    let a = strip(0.0, 0.5);
    let mut c = ExperimentConfig::new(Mode::Poisson, unit(), vec![a.clone()], 2000, 606);
    c.functionals = vec![FunctionalSpec::point_count()];
    c.scales = vec![25.0];
    let m = run_replicates(&c, 0).map_err(|e| e.to_string())?;
    let poisson = estimate_covariance(&m, c.normalization(0)).map_err(|e| e.to_string())?;
    let (pv, pse) = (poisson.cov[0][0], poisson.se[0][0]);

    c.mode = Mode::Binomial;
    c.sizes = vec![1000];
    let m = run_replicates(&c, 0).map_err(|e| e.to_string())?;
    let binom = estimate_covariance(&m, c.normalization(0)).map_err(|e| e.to_string())?;
    let (bv, bse) = (binom.cov[0][0], binom.se[0][0]);

    let ing = estimate_sigma_continuum(&[FunctionalSpec::point_count()], 2, 1.0, &WindowSchedule::new(2.0, 4.0), 50, 4, 606)
        .map_err(|e| e.to_string())?;
    let tau = estimate_tau(&ing, &[a], &unit()).map_err(|e| e.to_string())?;
    let tv = tau.tau[0][0];
    let tse = tau.tau_se[0][0];
    let msg = format!(
        "Poisson {pv:.4} +/- {pse:.4} (target 0.5); binomial {bv:.4} +/- {bse:.4} (target 0.25); tau {tv:.6} +/- {tse:.2e}"
    );
    if within(pv, 0.5, pse) && within(bv, 0.25, bse) && within(bv, tv, bse.hypot(tse)) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn nng_components_config(scale: f64, regions: Vec<Region>, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(Mode::Poisson, unit(), regions, 2000, seed);
    c.functionals = vec![FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 })];
    c.scales = vec![scale];
    c
}

fn white_noise() -> Outcome {
    let c = nng_components_config(25.0, vec![strip(0.0, 0.5), strip(0.25, 0.75), strip(0.5, 1.0)], 707);
    let m = run_replicates(&c, 0).map_err(|e| e.to_string())?;
    let cov = estimate_covariance(&m, c.normalization(0)).map_err(|e| e.to_string())?;
    let r = white_noise_check(&cov, &c.regions, &c.b0).map_err(|e| e.to_string())?;
    let p12 = r.pairs.iter().find(|p| p.i == 0 && p.j == 1).unwrap();
    let p13 = r.pairs.iter().find(|p| p.i == 0 && p.j == 2).unwrap();
    let msg = format!(
        "c12/c11 = {:.4} +/- {:.4} (target 0.5, z = {:.2}); c13 = {:.5} +/- {:.5} (z = {:.2})",
        p12.statistic, p12.se, p12.z, p13.statistic, p13.se, p13.z
    );
    if p12.z.abs() <= 3.0 && p13.disjoint && p13.z.abs() <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn normality() -> Outcome {
    let mut c = ExperimentConfig::new(Mode::Poisson, unit(), vec![strip(0.0, 0.5), strip(0.25, 0.75)], 2000, 808);
    c.functionals = vec![FunctionalSpec::total_length(GraphBuilder::Mst)];
    c.scales = vec![30.0];
    let m = run_replicates(&c, 0).map_err(|e| e.to_string())?;
    let r = test_normality(&m, 16, 808, 0.01).map_err(|e| e.to_string())?;
    let min_p = r.projections.iter().filter_map(|p| p.p_value).fold(1.0, f64::min);
    let msg = format!("{}/{} projections pass at alpha = 0.01 (min p = {min_p:.3})", r.passed_count, r.tested_count);
    if r.passed_count >= 15 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cross_consistency() -> Outcome {
    let spec = FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 });
    let ing = estimate_sigma_continuum(&[spec], 2, 1.0, &WindowSchedule::new(4.0, 8.0), 2000, 16, 909)
        .map_err(|e| e.to_string())?;
    let (sv, sse) = (ing.sigma_hat[0][0], ing.sigma_se[0][0]);
    let c = nng_components_config(40.0, vec![unit()], 909);
    let m = run_replicates(&c, 0).map_err(|e| e.to_string())?;
    let cov = estimate_covariance(&m, c.normalization(0)).map_err(|e| e.to_string())?;
    let (dv, dse) = (cov.cov[0][0], cov.se[0][0]);
    let z = (sv - dv) / sse.hypot(dse);
    let msg = format!("sigma |A| = {sv:.4} +/- {sse:.4}; direct {dv:.4} +/- {dse:.4}; z = {z:.2}");
    if z.abs() <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn homogeneity() -> Outcome {
    let mut worst = 0.0f64;
    for (ai, alpha) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let spec = FunctionalSpec::new(Family::WeightedEdgeLength { phi: Phi::Power { alpha } }, GraphBuilder::Mst);
        for c in 0..100u64 {
            let s = derive_seed(1010, &[ai as u64, c]);
            let mut rng = stream(s, &[]);
            let n = rng.random_range(2..120);
            let pts = sample_binomial(n, &unit(), s).unwrap();
            let lo = [rng.random_range(0.0..0.5), rng.random_range(0.0..0.5)];
            let a = Region::cuboid(&lo, &[lo[0] + 0.5, lo[1] + 0.5]).unwrap();
            for scale in [0.5, 2.0, 7.0] {
                let r = homogeneity_check(&spec, &pts, None, &a, scale, alpha).map_err(|e| e.to_string())?;
                worst = worst.max(r);
            }
        }
    }
    let msg = format!("900 checks, max residual {worst:e}");
    if worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn empirical_process() -> Outcome {
    let mut c = ExperimentConfig::new(Mode::Poisson, unit(), vec![unit()], 2000, 1111);
    c.scales = vec![25.0];
    let (r, _) = empirical_process_experiment(&c, &[0.3, 0.6, 0.9, 1.2]).map_err(|e| e.to_string())?;
    let s = &r.scales[0];
    let msg = format!(
        "symmetric = {}, min eigenvalue = {:.5} (SE {:.5})",
        s.symmetric, s.min_eigenvalue, s.min_eigenvalue_se
    );
    if s.symmetric && s.psd_within_noise {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Outcome {
    let mut c = ExperimentConfig::new(Mode::Poisson, unit(), vec![strip(0.0, 0.5), unit()], 400, 1212);
    c.functionals = vec![
        FunctionalSpec::total_length(GraphBuilder::Mst),
        FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 }),
    ];
    c.scales = vec![15.0];
    let a = run_replicates(&c, 0).map_err(|e| e.to_string())?;
    let b = run_replicates(&c, 0).map_err(|e| e.to_string())?;
    c.threads = Some(1);
    let serial = run_replicates(&c, 0).map_err(|e| e.to_string())?;
    c.threads = Some(8);
    let parallel = run_replicates(&c, 0).map_err(|e| e.to_string())?;
    let bits = |m: &stabgeom::harness::SampleMatrix| -> Vec<u64> { m.values.iter().flatten().map(|v| v.to_bits()).collect() };
    let rerun = bits(&a) == bits(&b) && a.seeds == b.seeds;
    let threads = bits(&serial) == bits(&parallel) && bits(&serial) == bits(&a);
    let msg = format!("rerun identical = {rerun}; 1 vs 8 threads identical = {threads}");
    if rerun && threads {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("MST oracle equivalence", 10, mst_oracle),
        ("MST insertion invariants", 30, lee_invariants),
        ("percolation increment bound", 60, percolation_bound),
        ("on-line NNG exact stabilization", 120, online_exact),
        ("cone lemma", 5, cone_lemma),
        ("point-count calibration", 120, point_count_calibration),
        ("white-noise proportionality", 300, white_noise),
        ("asymptotic normality", 600, normality),
        ("estimator cross-consistency", 900, cross_consistency),
        ("homogeneity exactness", 10, homogeneity),
        ("empirical-process sanity", 600, empirical_process),
        ("determinism and parallel equivalence", 60, determinism),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let slow = took > Duration::from_secs(*budget);
        let ok = outcome.is_ok() && !slow;
        if !ok {
            failed += 1;
        }
        let detail = match &outcome {
            Ok(s) | Err(s) => s.as_str(),
        };
        println!(
            "criterion {:>2} {}: {name}: {detail} [{:.1} s of {budget} s{}]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            if slow { ", over budget" } else { "" }
        );
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
