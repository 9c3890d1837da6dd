//! Covariance function of MST edge-length counts over a grid of thresholds.

use stabgeom::geometry::Region;
use stabgeom::harness::{empirical_process_experiment, ExperimentConfig, Mode};

fn main() -> stabgeom::Result<()> {
    let mut cfg = ExperimentConfig::new(Mode::Poisson, Region::unit_cube(2), vec![Region::unit_cube(2)], 1000, 9);
    cfg.scales = vec![20.0];
    let s = [0.3, 0.6, 0.9, 1.2];
    let (r, _) = empirical_process_experiment(&cfg, &s)?;
    let e = &r.scales[0];
    for (i, row) in e.covariance.cov.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:8.4}")).collect();
        println!("s = {:.1}: {}", s[i], cells.join(" "));
    }
    println!("min eigenvalue {:.5} (SE {:.5}), PSD within noise: {}", e.min_eigenvalue, e.min_eigenvalue_se, e.psd_within_noise);
    Ok(())
}
