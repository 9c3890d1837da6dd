//! kNN, sphere-of-influence and on-line nearest-neighbour graphs on one sample.

use stabgeom::geometry::Region;
use stabgeom::graphs::GraphBuilder;
use stabgeom::point_process::{attach_marks, sample_poisson};

fn main() -> stabgeom::Result<()> {
    let (pts, marks) = attach_marks(sample_poisson(1.0, &Region::centered_cube(2, 15.0)?, 3)?, 3).into_parts();
    println!("{} points", pts.len());
    for b in [GraphBuilder::Knng { k: 1 }, GraphBuilder::Knng { k: 3 }, GraphBuilder::Sig, GraphBuilder::OnlineNng] {
        let g = b.build(&pts, Some(&marks))?;
        let comps = g.components().into_iter().max().map_or(0, |m| m + 1);
        println!(
            "{:>12}: {:>5} edges, length {:>9.3}, {:>4} components, max degree {}",
            b.name(),
            g.edges().len(),
            g.total_length(),
            comps,
            g.max_degree()
        );
    }
    Ok(())
}
