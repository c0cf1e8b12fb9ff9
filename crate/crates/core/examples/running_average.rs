//! Sublinear activation schedule: the running-average optimality gap against
//! its computed bound.

use idlegrad::experiment::{preset, run_simulation, AlgorithmSpec, ExperimentConfig, GraphSpec, LabeledAlgorithm, ScheduleSpec};
use idlegrad::prelude::*;

fn main() -> idlegrad::Result<()> {
    let ExperimentConfig::Simulation(mut cfg) = preset("fig1")? else { unreachable!() };
    cfg.graph = GraphSpec::RandomGeometric { nodes: 10, radius: None, target_edges: Some(15.0) };
    cfg.schedule = ScheduleSpec::Fixed { schedule: ActivationSchedule::Sublinear { cu: 0.5, zeta: 1.5 } };
    cfg.algorithms = vec![LabeledAlgorithm::new("idling", AlgorithmSpec::Idling)];
    cfg.target_eps = None;
    cfg.replicas = 10;
    cfg.budget = 1000;
    cfg.record_error_norm = false;
    cfg.record_running_average = true;
    let res = run_simulation(&cfg)?;
    let g = &res.algorithms[0].aggregate;
    println!("S_u = {:.4}", res.setting.bounds.s_u);
    for k in [10usize, 100, 1000] {
        println!("k = {k:>4}: gap {:.4e} <= {:.4e}", g.ra_gap.mean[k], res.setting.bounds.nondiff_rhs(k as u64));
    }
    Ok(())
}
