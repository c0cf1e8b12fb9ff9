//! Idling under link and gradient-computation failures.

use idlegrad::experiment::{preset, run_simulation, AlgorithmSpec, ExperimentConfig, LabeledAlgorithm};

fn main() -> idlegrad::Result<()> {
    let ExperimentConfig::Simulation(mut cfg) = preset("fig3c")? else { unreachable!() };
    cfg.replicas = 5;
    cfg.budget = 1500;
    cfg.algorithms = vec![
        LabeledAlgorithm::new("no failures", AlgorithmSpec::Idling),
        LabeledAlgorithm::new("links only", AlgorithmSpec::Async { link_up: 0.5, grad_success: vec![1.0] }),
        LabeledAlgorithm::new("gradients 0.7", AlgorithmSpec::Async { link_up: 1.0, grad_success: vec![0.7] }),
        LabeledAlgorithm::new("0.9 / 0.5", AlgorithmSpec::Async { link_up: 0.5, grad_success: vec![0.9, 0.5] }),
    ];
    let res = run_simulation(&cfg)?;
    for a in &res.algorithms {
        let g = &a.aggregate.rel_err;
        println!("{:>14}: final mean relative error {:.3e} (se {:.1e})", a.label, g.mean.last().unwrap(), g.se.last().unwrap());
    }
    Ok(())
}
