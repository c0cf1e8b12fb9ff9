//! Randomized edge gossip against the idling method at equal iteration
//! count.

use idlegrad::experiment::{preset, run_simulation, ExperimentConfig};

fn main() -> idlegrad::Result<()> {
    let ExperimentConfig::Simulation(mut cfg) = preset("fig3d")? else { unreachable!() };
    cfg.replicas = 4;
    cfg.budget = 2000;
    let res = run_simulation(&cfg)?;
    for a in &res.algorithms {
        let g = &a.aggregate;
        let last = g.len() - 1;
        println!(
            "{:>7}: relative error {:.3e}, total cost {:.0} after {} iterations",
            a.label, g.rel_err.mean[last], g.total_cost.mean[last], g.k[last]
        );
    }
    Ok(())
}
