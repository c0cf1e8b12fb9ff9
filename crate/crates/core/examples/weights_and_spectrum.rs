//! Random geometric graph, Metropolis weights, the positive-definite shift
//! and the spectral quantities the bounds depend on.

use idlegrad::graph::{radius_for_expected_edges, random_geometric_graph, DEFAULT_ATTEMPTS, DEFAULT_KAPPA};
use idlegrad::prelude::*;

fn main() -> idlegrad::Result<()> {
    let n = 50;
    let r = radius_for_expected_edges(n, 214.0);
    let net = random_geometric_graph(n, r, &mut stream(7, 0, Purpose::Graph), DEFAULT_ATTEMPTS)?;
    println!("radius {r:.4}: {} edges, max degree {}", net.edge_count(), net.max_degree());

    let c = metropolis_weights(&net);
    let before = Spectrum::compute(&c, &net)?;
    let pd = ensure_positive_definite(&net, &c, DEFAULT_KAPPA)?;
    let after = Spectrum::compute(&pd, &net)?;
    println!("Metropolis: lambda_2 = {:.6}, lambda_N = {:+.6}", before.lambda2_c, before.lambda_n_c);
    println!("shifted:    lambda_2 = {:.6}, lambda_N = {:+.6}", after.lambda2_c, after.lambda_n_c);
    println!("spectral gap {:.6}, Laplacian lambda_2 {:.6}", after.spectral_gap(), after.laplacian_lambda2());
    Ok(())
}
