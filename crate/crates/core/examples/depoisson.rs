//! Binomial samples of fixed size against the de-Poissonized limit.

use stabgeom::functionals::FunctionalSpec;
use stabgeom::geometry::Region;
use stabgeom::graphs::GraphBuilder;
use stabgeom::harness::{depoisson_experiment, ExperimentConfig, Mode, SigmaSettings};
use stabgeom::stabilization::WindowSchedule;

fn main() -> stabgeom::Result<()> {
    let halves = vec![Region::cuboid(&[0.0, 0.0], &[0.5, 1.0])?, Region::cuboid(&[0.5, 0.0], &[1.0, 1.0])?];
    let mut cfg = ExperimentConfig::new(Mode::Binomial, Region::unit_cube(2), halves, 1000, 3);
    cfg.functionals = vec![FunctionalSpec::point_count(), FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 })];
    cfg.sizes = vec![1000];
    cfg.sigma = Some(SigmaSettings { schedule: WindowSchedule::new(4.0, 8.0), outer_n: 300, inner_m: 16 });
    let (report, _) = depoisson_experiment(&cfg)?;
    let tau = report.tau.as_ref().expect("tau");
    let cov = &report.scales[0].covariance;
    for i in 0..2 {
        for j in 0..2 {
            println!(
                "({i},{j}): measured {:8.4} +/- {:.4}, tau {:8.4} +/- {:.4}",
                cov.cov[i][j], cov.se[i][j], tau.tau[i][j], tau.tau_se[i][j]
            );
        }
    }
    Ok(())
}
