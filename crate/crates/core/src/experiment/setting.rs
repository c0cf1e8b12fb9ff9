//! Turns a simulation config into a concrete network, instance, step size,
//! schedule and reference solutions.

use rand::Rng;

use super::config::{AlphaRule, GraphSpec, PdRule, ProblemSpec, ScheduleSpec, SimulationConfig, WeightSpec};
use crate::costs::{derive_constants, ConstraintSet, CostModel, LogisticCosts, ProblemInstance, QuadraticCosts};
use crate::data::{gen_synthetic, parse_libsvm, partition, partition_shuffled};
use crate::graph::{
    ensure_positive_definite, equal_weights, metropolis_weights, radius_for_expected_edges, random_geometric_graph,
    Network, Spectrum, WeightMatrix, DEFAULT_ATTEMPTS,
};
use crate::oracle::{
    solve_centralized, solve_penalty, theory_bounds, Bounds, CentralizedSolution, PenaltySolution, DEFAULT_TOL,
};
use crate::rng::{stream, Purpose};
use crate::schedule::{delta_from_alpha, ActivationSchedule};
use crate::stack::NodeStack;
use crate::{Error, Result};

/// Bundled LIBSVM sample used when no data file is given. Not a1a.
pub const FIXTURE_LIBSVM: &str = include_str!("../../fixtures/sample_a1a_like.libsvm");

/// Marker recorded in reports when the bundled sample stood in for a1a.
pub const FIXTURE_MARKER: &str = "bundled-fixture (not-a1a)";

/// Everything a simulation needs, fixed before any replica runs.
#[derive(Debug, Clone)]
pub struct Setting {
    pub net: Network,
    pub c: WeightMatrix,
    pub spectrum: Spectrum,
    /// Whether the positive-definite shift was applied to `C`.
    pub pd_applied: bool,
    pub inst: ProblemInstance,
    pub alpha: f64,
    pub schedule: ActivationSchedule,
    pub data_source: String,
    pub x0: NodeStack,
    pub centralized: CentralizedSolution,
    pub penalty: PenaltySolution,
    pub bounds: Bounds,
}

pub fn build_network(spec: &GraphSpec, seed: u64) -> Result<Network> {
    Ok(match spec {
        GraphSpec::RandomGeometric { nodes, radius, target_edges } => {
            let r = match (radius, target_edges) {
                (Some(r), _) => *r,
                (None, Some(e)) => radius_for_expected_edges(*nodes, *e),
                (None, None) => return Err(Error::Config("graph: radius or target_edges required".into())),
            };
            random_geometric_graph(*nodes, r, &mut stream(seed, 0, Purpose::Graph), DEFAULT_ATTEMPTS)?
        }
        GraphSpec::Path { nodes } => Network::path(*nodes)?,
        GraphSpec::Cycle { nodes } => Network::cycle(*nodes)?,
        GraphSpec::Complete { nodes } => Network::complete(*nodes)?,
        GraphSpec::EdgeList { path } => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
            Network::from_edge_list(&text)?
        }
    })
}

/// Builds the costs and feasible set; returns the instance and a data label.
pub fn build_instance(spec: &ProblemSpec, nodes: usize, seed: u64) -> Result<(ProblemInstance, String)> {
    let mut rng = stream(seed, 0, Purpose::Data);
    let (model, set, rule, source) = match spec {
        ProblemSpec::SyntheticLogistic { per_node, feature_dim, noise_sd, radius, reg, lipschitz } => {
            let data = gen_synthetic(nodes, *per_node, *feature_dim, *noise_sd, &mut rng)?;
            let model = CostModel::Logistic(LogisticCosts::from_shards(&data.shards, *reg)?);
            (model, ConstraintSet::ball(*radius), *lipschitz, "synthetic".to_string())
        }
        ProblemSpec::Libsvm { path, feature_dim, radius, reg, lipschitz, shuffle } => {
            let (bytes, source) = match path {
                Some(p) => {
                    let b = std::fs::read(p).map_err(|source| Error::Io { path: p.clone(), source })?;
                    (b, format!("libsvm:{p}"))
                }
                None => (FIXTURE_LIBSVM.as_bytes().to_vec(), FIXTURE_MARKER.to_string()),
            };
            let ds = parse_libsvm(&bytes, Some(*feature_dim))?;
            let shards = if *shuffle { partition_shuffled(&ds, nodes, &mut rng)? } else { partition(&ds, nodes)? };
            let model = CostModel::Logistic(LogisticCosts::from_shards(&shards, *reg)?);
            (model, ConstraintSet::ball(*radius), *lipschitz, source)
        }
        ProblemSpec::Quadratic { lo, hi, dim, radius } => {
            let rows: Vec<Vec<f64>> =
                (0..nodes).map(|_| (0..*dim).map(|_| rng.random_range(*lo..=*hi)).collect()).collect();
            let model = CostModel::QuadraticIdentity(QuadraticCosts::new(NodeStack::from_rows(&rows)));
            (model, ConstraintSet::ball(*radius), Default::default(), "quadratic".to_string())
        }
        ProblemSpec::ScalarSquare => {
            let model = CostModel::QuadraticIdentity(QuadraticCosts::new(NodeStack::zeros(nodes, 1)));
            (model, ConstraintSet::cube(1, -2.0, 2.0), Default::default(), "scalar-square".to_string())
        }
    };
    Ok((derive_constants(model, set, rule)?, source))
}

fn resolve_alpha(rule: AlphaRule, inst: &ProblemInstance, lambda_n: f64) -> f64 {
    match rule {
        AlphaRule::Absolute { value } => value,
        AlphaRule::InverseL { factor } => 1.0 / (factor * inst.lipschitz_l),
        AlphaRule::LambdaN => lambda_n / inst.lipschitz_l,
    }
}

pub fn resolve_schedule(spec: ScheduleSpec, alpha: f64, mu: f64) -> ActivationSchedule {
    match spec {
        ScheduleSpec::GeometricFromAlpha { cap } => ActivationSchedule::Geometric { delta: delta_from_alpha(alpha, mu, cap) },
        ScheduleSpec::CappedFromAlpha { floor, cap } => {
            ActivationSchedule::CappedGeometric { delta: delta_from_alpha(alpha, mu, cap), floor, cap }
        }
        ScheduleSpec::Fixed { schedule } => schedule,
    }
}

pub fn build_setting(cfg: &SimulationConfig) -> Result<Setting> {
    cfg.validate().map_err(Error::Config)?;
    let net = build_network(&cfg.graph, cfg.seed)?;
    let (inst, data_source) = build_instance(&cfg.problem, net.nodes(), cfg.seed)?;

    let (c, pd_applied, alpha) = match &cfg.weights {
        WeightSpec::Metropolis { pd } => {
            let base = metropolis_weights(&net);
            let lambda_n = Spectrum::compute(&base, &net)?.lambda_n_c;
            let provisional = resolve_alpha(cfg.alpha, &inst, lambda_n);
            let shift = match *pd {
                PdRule::Always { kappa } => Some(kappa),
                PdRule::Auto { kappa } if lambda_n < provisional * inst.lipschitz_l || lambda_n <= 0.0 => Some(kappa),
                _ => None,
            };
            match shift {
                Some(kappa) => {
                    let c = ensure_positive_definite(&net, &base, kappa)?;
                    let lambda_n = Spectrum::compute(&c, &net)?.lambda_n_c;
                    (c, true, resolve_alpha(cfg.alpha, &inst, lambda_n))
                }
                None => (base, false, provisional),
            }
        }
        WeightSpec::Equal { c0 } => {
            let c0 = c0.unwrap_or(1.0 / (2.0 * net.nodes() as f64));
            let c = equal_weights(&net, c0)?;
            let lambda_n = Spectrum::compute(&c, &net)?.lambda_n_c;
            (c, false, resolve_alpha(cfg.alpha, &inst, lambda_n))
        }
    };
    let spectrum = Spectrum::compute(&c, &net)?;
    if !(alpha > 0.0 && alpha * inst.mu < 1.0) {
        return Err(Error::Config(format!("alpha = {alpha} must satisfy 0 < alpha*mu < 1")));
    }
    let schedule = resolve_schedule(cfg.schedule, alpha, inst.mu);
    let x0 = cfg.init.draw(&inst, &mut stream(cfg.seed, 0, Purpose::Init));
    let centralized = solve_centralized(&inst, DEFAULT_TOL, cfg.oracle_budget)?;
    let start = NodeStack::replicate(inst.nodes(), &centralized.x_star);
    let penalty = solve_penalty(&inst, &c, alpha, DEFAULT_TOL, cfg.oracle_budget, start)?;
    let bounds = theory_bounds(&inst, spectrum.lambda2_c, spectrum.lambda_n_c, alpha, &schedule);
    Ok(Setting { net, c, spectrum, pd_applied, inst, alpha, schedule, data_source, x0, centralized, penalty, bounds })
}
