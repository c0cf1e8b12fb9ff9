//! Closed-form constants for a preset: neighbourhood radius, mixing factor,
//! error and disagreement bounds, and the mean-rate envelope.

use idlegrad::experiment::{build_setting, preset, ExperimentConfig};

fn main() -> idlegrad::Result<()> {
    let ExperimentConfig::Simulation(cfg) = preset("fig1")? else { unreachable!() };
    let st = build_setting(&cfg)?;
    let b = &st.bounds;
    println!("alpha = {:.4e}, {}", st.alpha, st.schedule.formula());
    println!("alpha <= lambda_N/L: {}", b.step_size_ok);
    println!("|x* - x.|^2 <= {:.4e}", b.neighbourhood_radius_sq());
    println!("beta^2 = {:.12}, 1 - beta = {:.4e}", b.beta_sq, b.one_minus_beta);
    println!("E|disagreement|^2 <= {:.4e}", b.disagreement_bound);
    for k in [0u64, 100, 1000] {
        let p = st.schedule.probability(k);
        println!("k = {k:>4}: p_k = {p:.4}, E|e|^2 <= {:.4e}, standard |x - x.| <= {:.4e}", b.error_bound(p), b.standard_rate(k));
    }
    if let Some(eta) = b.eta {
        println!("eta = {eta:.6}, mean-rate constant {:.4e}", b.mean_rate_const);
    }
    Ok(())
}
