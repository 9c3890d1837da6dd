//! Poisson and binomial samples on a box, with marks and CSV output.

use stabgeom::geometry::Region;
use stabgeom::point_process::{attach_marks, sample_binomial, sample_poisson};

fn main() -> stabgeom::Result<()> {
    let window = Region::centered_cube(2, 5.0)?;
    let poisson = sample_poisson(2.0, &window, 42)?;
    println!("Poisson(2) on [-5,5)^2: {} points (mean {})", poisson.len(), 2.0 * window.measure());

    let binomial = sample_binomial(100, &Region::unit_cube(3), 42)?;
    println!("binomial n = 100 in [0,1)^3: diameter {:.4}", binomial.diameter());

    let marked = attach_marks(sample_poisson(1.0, &Region::unit_cube(2).scale(3.0)?, 7)?, 7);
    let mut out = Vec::new();
    marked.points().write_csv(&mut out, Some(marked.marks()))?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
