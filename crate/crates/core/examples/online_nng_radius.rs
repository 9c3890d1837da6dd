//! Exact stabilization radius of the on-line nearest-neighbour graph from a
//! cone cover, checked by adversarial probes; probe doubling for the MST.

use stabgeom::graphs::GraphBuilder;
use stabgeom::harness::{stab_radius_experiment, StabRadiusConfig};

fn main() -> stabgeom::Result<()> {
    let mut cfg = StabRadiusConfig {
        builder: GraphBuilder::OnlineNng,
        lambda: 1.0,
        dim: 2,
        window: 20.0,
        configs: 10,
        probes: 50,
        seed: 1,
        require_exact: true,
        threads: None,
    };
    let r = stab_radius_experiment(&cfg)?;
    for e in &r.entries {
        println!("config {:>2}: {} points, radius {:7.3}, probes {} passed = {}", e.config, e.n_points, e.radius, e.report.probes_run, e.report.passed);
    }
    println!("on-line NNG: {} draws for {} exact radii, {} failures", r.attempts, r.entries.len(), r.exact_failures);

    cfg.builder = GraphBuilder::Mst;
    cfg.configs = 3;
    cfg.window = 8.0;
    for e in stab_radius_experiment(&cfg)?.entries {
        println!("MST config {}: heuristic radius {:.3} (probes passed = {})", e.config, e.radius, e.report.passed);
    }
    Ok(())
}
