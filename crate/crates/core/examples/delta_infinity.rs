//! Limiting add-one cost of several functionals on growing windows.

use stabgeom::functionals::FunctionalSpec;
use stabgeom::graphs::GraphBuilder;
use stabgeom::stabilization::{estimate_delta_infinity, WindowSchedule};

fn main() -> stabgeom::Result<()> {
    let schedule = WindowSchedule::new(2.0, 16.0);
    for spec in [
        FunctionalSpec::point_count(),
        FunctionalSpec::total_length(GraphBuilder::Mst),
        FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 }),
    ] {
        let d = estimate_delta_infinity(&spec, 2, 1.0, &schedule, 400, 3)?;
        println!(
            "{:>18}: E = {:.4} +/- {:.4}, Var = {:.4}, stabilized in {:.1}% of samples",
            spec.label(),
            d.mean,
            d.std_error,
            d.variance,
            100.0 * d.converged_fraction
        );
    }
    Ok(())
}
