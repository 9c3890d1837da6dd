//! Runs a lattice CLT experiment and writes the report, CSV and SVG files.

use stabgeom::geometry::Region;
use stabgeom::harness::{clt_experiment, emit_report, ExperimentConfig, Mode};
use stabgeom::percolation::LatticeFunctional;

fn main() -> stabgeom::Result<()> {
    let strips = vec![Region::cuboid(&[0.0, 0.0], &[0.5, 1.0])?, Region::cuboid(&[0.5, 0.0], &[1.0, 1.0])?];
    let mut cfg = ExperimentConfig::new(Mode::Lattice, Region::unit_cube(2), strips, 500, 6);
    cfg.lattice_functionals = vec![LatticeFunctional::ClusterCount];
    cfg.p = 0.5;
    cfg.scales = vec![32.0, 48.0];
    let (report, mats) = clt_experiment(&cfg)?;
    let dir = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("stabgeom_report"), Into::into);
    for f in emit_report(&report, &mats, &dir)? {
        println!("{}", f.display());
    }
    for c in &report.criteria {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
