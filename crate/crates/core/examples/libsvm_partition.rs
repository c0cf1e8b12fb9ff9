//! Parse a LIBSVM file, split it across nodes and build logistic costs.
//!
//! `cargo run --example libsvm_partition -- path/to/a1a` reads a real file;
//! without an argument the bundled sample is used.

use idlegrad::data::{parse_libsvm, partition};
use idlegrad::experiment::FIXTURE_LIBSVM;
use idlegrad::prelude::*;

fn main() -> idlegrad::Result<()> {
    let bytes = match std::env::args().nth(1) {
        Some(p) => std::fs::read(&p).map_err(|source| idlegrad::Error::Io { path: p, source })?,
        None => FIXTURE_LIBSVM.as_bytes().to_vec(),
    };
    let ds = parse_libsvm(&bytes, Some(119))?;
    let shards = partition(&ds, 50)?;
    println!("{} points, {} features -> {} nodes x {}", ds.len(), ds.feature_dim, shards.nodes(), shards.per_node());

    let model = CostModel::Logistic(LogisticCosts::from_shards(&shards, 0.1)?);
    for rule in [LipschitzRule::PerNodeMax, LipschitzRule::NetworkAverage] {
        let inst = derive_constants(model.clone(), ConstraintSet::ball(100.0), rule)?;
        println!("{rule:?}: mu = {}, L = {:.4}, G = {:.2}", inst.mu, inst.lipschitz_l, inst.grad_bound_g);
    }
    Ok(())
}
