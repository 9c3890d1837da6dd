//! Poisson-mode CLT run: covariance over overlapping strips is proportional
//! to the overlap area, with agreement against the stabilization estimate.

use stabgeom::functionals::FunctionalSpec;
use stabgeom::geometry::Region;
use stabgeom::graphs::GraphBuilder;
use stabgeom::harness::{clt_experiment, ExperimentConfig, Mode, SigmaSettings};
use stabgeom::stabilization::WindowSchedule;

fn main() -> stabgeom::Result<()> {
    let strip = |a: f64, b: f64| Region::cuboid(&[a, 0.0], &[b, 1.0]);
    let mut cfg = ExperimentConfig::new(Mode::Poisson, Region::unit_cube(2), vec![strip(0.0, 0.5)?, strip(0.25, 0.75)?, strip(0.5, 1.0)?], 1000, 7);
    cfg.functionals = vec![FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 })];
    cfg.scales = vec![20.0];
    cfg.sigma = Some(SigmaSettings { schedule: WindowSchedule::new(4.0, 8.0), outer_n: 500, inner_m: 16 });
    let (report, _) = clt_experiment(&cfg)?;
    if let Some(p) = &report.proportionality {
        for c in &p.pairs {
            println!("pair ({}, {}): statistic {:.4}, expected {:.4}, z = {:.2}", c.i, c.j, c.statistic, c.expected, c.z);
        }
    }
    for c in &report.criteria {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
