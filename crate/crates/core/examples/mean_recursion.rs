//! Exact first moments of the idling method on a quadratic, against their
//! closed-form envelope.

use idlegrad::graph::equal_weights;
use idlegrad::oracle::{quadratic_bounds, quadratic_mean_recursion, QuadraticSetup};
use idlegrad::prelude::*;

fn main() -> idlegrad::Result<()> {
    let net = Network::cycle(4)?;
    let c0 = 1.0 / 8.0;
    let c = equal_weights(&net, c0)?;
    let lambda2_l = Spectrum::compute(&c, &net)?.laplacian_lambda2();
    let setup = QuadraticSetup {
        centers: NodeStack::from_rows(&[vec![0.5], vec![4.0], vec![1.5], vec![3.0]]),
        c0,
        lambda2_l,
        theta: 1.0 / (c0 * lambda2_l),
        alpha: 0.01,
        x0: NodeStack::zeros(4, 1),
    };
    let qb = quadratic_bounds(&setup)?;
    let rec = quadratic_mean_recursion(&setup, &c, &setup.schedule(), 2001);
    for k in [3u64, 11, 101, 501, 2001] {
        println!("k = {k:>4}: chi = {:.5}, bound {:.5}, standard bound {:.5}", rec.chi[k as usize], qb.chi_ub(k).unwrap(), qb.xi_ub(k));
    }
    Ok(())
}
