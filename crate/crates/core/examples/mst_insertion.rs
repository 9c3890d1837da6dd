//! Euclidean MST and the edge changes caused by inserting one point.

use stabgeom::geometry::Region;
use stabgeom::graphs::{build_mst, edge_delta, GraphBuilder};
use stabgeom::point_process::sample_binomial;

fn main() -> stabgeom::Result<()> {
    let pts = sample_binomial(2000, &Region::unit_cube(2), 1)?;
    let mst = build_mst(&pts);
    println!("MST on 2000 points: {} edges, length {:.5}, max degree {}", mst.edges().len(), mst.total_length(), mst.max_degree());

    let small = sample_binomial(50, &Region::unit_cube(2), 2)?;
    let d = edge_delta(&GraphBuilder::Mst, &small, None, &[0.5, 0.5], None)?;
    println!("insert (0.5, 0.5): +{} edges, -{} edges", d.added.len(), d.removed.len());
    println!("longest added {:.4}, longest removed {:.4}", d.longest_added(), d.longest_removed());
    assert!(d.added.iter().all(|e| e.touches(d.inserted)));
    Ok(())
}
