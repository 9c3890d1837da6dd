//! Nested Monte Carlo estimates of the limiting covariance matrix and its
//! de-Poissonized counterpart.

use stabgeom::functionals::FunctionalSpec;
use stabgeom::geometry::Region;
use stabgeom::graphs::GraphBuilder;
use stabgeom::percolation::LatticeFunctional;
use stabgeom::stabilization::{estimate_sigma_continuum, estimate_sigma_lattice, estimate_tau, WindowSchedule};

fn main() -> stabgeom::Result<()> {
    let specs = [FunctionalSpec::point_count(), FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 })];
    let ing = estimate_sigma_continuum(&specs, 2, 1.0, &WindowSchedule::new(4.0, 8.0), 500, 16, 1)?;
    println!("continuum sigma ({}, converged = {}):", ing.estimator, ing.converged);
    for (i, row) in ing.sigma_hat.iter().enumerate() {
        println!("  {:>16}: {:?}  (E delta = {:.4})", ing.labels[i], row, ing.mean_delta[i]);
    }
    let b0 = Region::unit_cube(2);
    let regions = [Region::cuboid(&[0.0, 0.0], &[0.5, 1.0])?, Region::cuboid(&[0.25, 0.0], &[0.75, 1.0])?];
    let tau = estimate_tau(&ing, &regions, &b0)?;
    println!("tau: {:?}", tau.tau);

    let lat = estimate_sigma_lattice(&[LatticeFunctional::ClusterCount], 2, 0.3, &WindowSchedule::new(4.0, 8.0), 300, 8, 2)?;
    println!("lattice sigma* for cluster count at p = 0.3: {:.5} +/- {:.5}", lat.sigma_hat[0][0], lat.sigma_se[0][0]);
    Ok(())
}
