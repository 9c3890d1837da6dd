//! Random-projection KS tests with a bootstrap null on MST lengths and on a
//! clearly non-normal sample.

use rand::Rng;
use stabgeom::functionals::FunctionalSpec;
use stabgeom::geometry::Region;
use stabgeom::graphs::GraphBuilder;
use stabgeom::harness::{run_replicates, test_normality, ExperimentConfig, Mode, SampleMatrix};
use stabgeom::rng::stream;

fn main() -> stabgeom::Result<()> {
    let regions = vec![Region::cuboid(&[0.0, 0.0], &[0.5, 1.0])?, Region::cuboid(&[0.25, 0.0], &[0.75, 1.0])?];
    let mut cfg = ExperimentConfig::new(Mode::Poisson, Region::unit_cube(2), regions, 1000, 4);
    cfg.functionals = vec![FunctionalSpec::total_length(GraphBuilder::Mst)];
    cfg.scales = vec![20.0];
    let m = run_replicates(&cfg, 0)?;
    let r = test_normality(&m, 16, 1, 0.01)?;
    println!("MST lengths: {}/{} projections pass, Bonferroni p = {:.3}", r.passed_count, r.tested_count, r.combined_p.unwrap_or(1.0));

    let mut rng = stream(2, &[]);
    let rows = (0..3000).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
    let u = SampleMatrix::from_rows(Mode::Poisson, 1.0, vec!["u1".into(), "u2".into()], rows)?;
    let r = test_normality(&u, 16, 1, 0.01)?;
    println!("uniform rows: {}/{} projections pass, combined test passed = {}", r.passed_count, r.tested_count, r.combined_passed);
    Ok(())
}
