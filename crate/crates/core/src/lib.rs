//! Distributed projected-gradient optimization where nodes randomly idle.
//!
//! A network of `N` nodes jointly minimizes `Σ_i f_i(x)` over a compact
//! convex set. The standard method activates every node at every
//! iteration; the idling method activates node `i` at iteration `k` with
//! probability `p_k → 1` and rescales its gradient step by `1/p_k`. This
//! crate simulates both (plus an asynchronous variant and a gossip
//! baseline), computes reference solutions and every closed-form bound, and
//! runs reproducible Monte-Carlo experiments.
//!
//! ```
//! use idlegrad::prelude::*;
//!
//! let net = Network::path(3).unwrap();
//! let c = metropolis_weights(&net);
//! let centers = NodeStack::from_rows(&[vec![1.0], vec![2.0], vec![6.0]]);
//! let model = CostModel::QuadraticIdentity(QuadraticCosts::new(centers));
//! let inst = derive_constants(model, ConstraintSet::ball(10.0), LipschitzRule::PerNodeMax).unwrap();
//!
//! let cfg = RunConfig::new(Algorithm::Idling, 0.05, ActivationSchedule::Geometric { delta: 0.9 }, 200);
//! let out = run(&cfg, &inst, &net, &c, &OracleValues::default()).unwrap();
//! assert!(out.trace.last().unwrap().total_cost < 3 * 200);
//! ```

pub mod checks;
pub mod costs;
pub mod data;
pub mod engine;
pub mod experiment;
pub mod graph;
pub mod oracle;
pub mod rng;
pub mod schedule;
pub mod stack;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Cost(#[from] costs::CostError),
    #[error(transparent)]
    Data(#[from] data::DataError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Metric(#[from] engine::MetricError),
    #[error("config: {0}")]
    Config(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub mod prelude {
    pub use crate::costs::{derive_constants, ConstraintSet, CostModel, LipschitzRule, LogisticCosts, ProblemInstance, QuadraticCosts};
    pub use crate::engine::{run, Algorithm, InitMode, OracleValues, RunConfig, RunState, Target, TargetMetric};
    pub use crate::graph::{equal_weights, ensure_positive_definite, metropolis_weights, Network, Spectrum, WeightMatrix};
    pub use crate::rng::{stream, Purpose};
    pub use crate::schedule::{ActivationSchedule, ActivationVector, AsyncConfig};
    pub use crate::stack::NodeStack;
}
