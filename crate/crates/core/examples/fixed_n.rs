//! Fixed-n samples in the unit square, rescaled by homogeneity.

use stabgeom::functionals::FunctionalSpec;
use stabgeom::geometry::Region;
use stabgeom::graphs::GraphBuilder;
use stabgeom::harness::{fixed_n_experiment, ExperimentConfig, Mode, SigmaSettings};
use stabgeom::stabilization::WindowSchedule;

fn main() -> stabgeom::Result<()> {
    let mut cfg = ExperimentConfig::new(Mode::FixedN, Region::unit_cube(2), vec![Region::unit_cube(2)], 500, 5);
    cfg.functionals = vec![FunctionalSpec::total_length(GraphBuilder::Mst)];
    cfg.sizes = vec![250, 500, 1000];
    cfg.gamma = Some(1.0);
    cfg.sigma = Some(SigmaSettings { schedule: WindowSchedule::new(4.0, 8.0), outer_n: 200, inner_m: 16 });
    let (report, _) = fixed_n_experiment(&cfg)?;
    for s in &report.scales {
        println!("n = {:>5}: scaled variance {:.5} +/- {:.5}", s.scale, s.covariance.cov[0][0], s.covariance.se[0][0]);
    }
    let tau = report.tau.as_ref().expect("tau");
    println!("limit estimate: {:.5} +/- {:.5}", tau.tau[0][0], tau.tau_se[0][0]);

    cfg.gamma = Some(2.0);
    match fixed_n_experiment(&cfg) {
        Err(e) => println!("declared order 2 refused: {e}"),
        Ok(_) => println!("unexpected: order 2 accepted"),
    }
    Ok(())
}
