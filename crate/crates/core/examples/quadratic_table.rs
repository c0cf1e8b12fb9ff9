//! Identity-Hessian quadratics: closed-form accuracy and cost predictions,
//! the exact mean recursion, and simulated cost to reach `ε(α)`.

use idlegrad::experiment::{preset, run_table, ExperimentConfig};

fn main() -> idlegrad::Result<()> {
    let ExperimentConfig::QuadraticTable(mut cfg) = preset("table1")? else { unreachable!() };
    cfg.alphas.truncate(4);
    let t = run_table(&cfg)?;
    println!("N = {}, lambda_2(L) = {:.4}, theta = {:.4}, R_sp = {:.4}, R_0 = {:.4}", t.nodes, t.lambda2_l, t.theta, t.r_sp, t.r_0);
    println!("{:>9} {:>8} {:>10} {:>10} {:>10} {:>9}", "alpha", "eps", "proposed", "standard", "diff", "1/(2at)");
    for r in &t.rows {
        println!(
            "{:>9.2e} {:>8.4} {:>10.0} {:>10} {:>10.0} {:>9.2}",
            r.alpha,
            r.epsilon,
            r.prop_cost.unwrap_or(f64::NAN),
            r.stand_cost.map_or("-".into(), |c| c.to_string()),
            r.cost_difference.unwrap_or(f64::NAN),
            r.predicted_savings
        );
    }
    println!("log-log slope of the cost difference: {:?}", t.slope);
    Ok(())
}
