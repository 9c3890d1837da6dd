//! Weighted edge-length sums, vertex landscapes and component counts over a subregion.

use stabgeom::functionals::{evaluate_many, Family, FunctionalSpec, Phi, Psi};
use stabgeom::geometry::Region;
use stabgeom::graphs::{rooted_neighborhood, GraphBuilder};
use stabgeom::point_process::{attach_marks, sample_poisson};

fn main() -> stabgeom::Result<()> {
    let window = Region::unit_cube(2).scale(20.0)?;
    let a = Region::cuboid(&[0.0, 0.0], &[10.0, 20.0])?;
    let (pts, marks) = attach_marks(sample_poisson(1.0, &window, 11)?, 11).into_parts();
    let specs = vec![
        FunctionalSpec::point_count(),
        FunctionalSpec::total_length(GraphBuilder::Mst),
        FunctionalSpec::new(Family::WeightedEdgeLength { phi: Phi::Power { alpha: 2.0 } }, GraphBuilder::Knng { k: 2 }),
        FunctionalSpec::new(Family::WeightedEdgeLength { phi: Phi::Indicator { s: 1.0 } }, GraphBuilder::Mst),
        FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 }),
        FunctionalSpec::new(Family::VertexLandscape { psi: Psi::RootDegreeIs { degree: 1 }, kappa: 1 }, GraphBuilder::OnlineNng),
    ];
    let regions = vec![a; specs.len()];
    for (s, v) in specs.iter().zip(evaluate_many(&specs, &pts, Some(&marks), &regions)?) {
        println!("{:>24} = {v:.4}", s.label());
    }
    let g = GraphBuilder::Mst.build(&pts, None)?;
    let r = rooted_neighborhood(&g, 0, 2)?;
    println!("2-neighbourhood of vertex 0 in the MST: {} vertices, root degree {}", r.vertex_count(), r.root_degree());
    Ok(())
}
