//! Standard and idling methods on a small logistic problem, compared by
//! activations spent to reach a relative-error target.

use idlegrad::experiment::{build_setting, preset, ExperimentConfig, SimulationConfig};
use idlegrad::prelude::*;

fn main() -> idlegrad::Result<()> {
    let ExperimentConfig::Simulation(fig1) = preset("fig1")? else { unreachable!() };
    let cfg = SimulationConfig { graph: idlegrad::experiment::GraphSpec::RandomGeometric { nodes: 20, radius: None, target_edges: Some(60.0) }, ..fig1 };
    let st = build_setting(&cfg)?;
    let oracle = OracleValues { f_star: Some(st.centralized.f_star), x_bullet: Some(st.penalty.x_bullet.clone()) };
    let target = Some(Target { metric: TargetMetric::RelErr, eps: 0.01 });

    for (label, algorithm, schedule) in [
        ("standard", Algorithm::Standard, ActivationSchedule::AlwaysOn),
        ("idling", Algorithm::Idling, st.schedule.clone()),
    ] {
        let mut rc = RunConfig::new(algorithm, st.alpha, schedule, 3000);
        rc.init = InitMode::Explicit { x: st.x0.clone() };
        rc.target = target;
        rc.stop_at_target = true;
        let out = run(&rc, &st.inst, &st.net, &st.c, &oracle)?;
        match out.target_hit {
            Some(k) => println!("{label:>8}: eps reached at k = {k}, cost {}", out.trace.rows[k as usize].total_cost),
            None => println!("{label:>8}: eps not reached"),
        }
    }
    Ok(())
}
