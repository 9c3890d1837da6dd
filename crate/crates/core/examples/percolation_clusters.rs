//! Site percolation on a scaled window: clusters, measures and the effect
//! of resampling one site.

use stabgeom::geometry::Region;
use stabgeom::percolation::{
    cluster_analysis, resample_increment, sample_lattice, ClusterWeight, LatticeFunctional, LatticeWindow,
};

fn main() -> stabgeom::Result<()> {
    let b0 = Region::unit_cube(2);
    let window = LatticeWindow::scaled(&b0, 40.0)?;
    let a = Region::cuboid(&[0.0, 0.0], &[0.5, 1.0])?;
    let measures = [
        LatticeFunctional::ClusterCount,
        LatticeFunctional::LargestComponent,
        LatticeFunctional::ClusterWeighted { psi: ClusterWeight::SizeAtMost { m: 3 } },
    ];
    for p in [0.3, 0.5927, 0.8] {
        let x = sample_lattice(p, &window, 5)?;
        let c = cluster_analysis(&x);
        print!("p = {p}: {} occupied, {} clusters, largest {}", x.occupied_count(), c.count(), c.max_size());
        for m in &measures {
            print!(", {} = {}", m.label(), m.evaluate(&x, &a)?);
        }
        println!();
        let worst = (0..2000u64)
            .map(|s| resample_increment(&x, &[20, 20], &LatticeFunctional::ClusterCount, &b0, s))
            .collect::<stabgeom::Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        println!("  largest |increment| from resampling site (20, 20): {worst}");
    }
    Ok(())
}
