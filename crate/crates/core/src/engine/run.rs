//! Drives one sample path of a chosen algorithm and records its trace.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::trace::{MetricError, OracleValues, Trace, TraceRow};
use super::{error_vector, step_async, step_gossip, step_idling, step_standard, RunState};
use crate::costs::ProblemInstance;
use crate::graph::{Network, WeightMatrix};
use crate::rng::{stream, Purpose};
use crate::schedule::{draw_activations, draw_async, ActivationSchedule, ActivationVector, AsyncConfig};
use crate::stack::NodeStack;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Algorithm {
    Standard,
    Idling,
    Async(AsyncConfig),
    Gossip,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Idling => "idling",
            Self::Async(_) => "async",
            Self::Gossip => "gossip",
        }
    }
}

/// How `x^(0)` is chosen. Random points are projected onto `𝓧`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitMode {
    /// One uniform point in `[−h, h]^d`, copied to every node.
    SharedUniform { half_width: f64 },
    Zero,
    /// Every coordinate of every node equal to `value`.
    Constant { value: f64 },
    /// Independent uniform points in `[−h, h]^d` per node.
    PerNodeUniform { half_width: f64 },
    Explicit { x: NodeStack },
}

impl InitMode {
    pub fn draw<R: Rng + ?Sized>(&self, inst: &ProblemInstance, rng: &mut R) -> NodeStack {
        let (n, d) = (inst.nodes(), inst.dim());
        let mut uniform = |h: f64| -> Vec<f64> {
            let mut p: Vec<f64> = (0..d).map(|_| rng.random_range(-h..=h)).collect();
            inst.project(&mut p);
            p
        };
        match self {
            Self::SharedUniform { half_width } => NodeStack::replicate(n, &uniform(*half_width)),
            Self::Zero => NodeStack::zeros(n, d),
            Self::Constant { value } => NodeStack::replicate(n, &vec![*value; d]),
            Self::PerNodeUniform { half_width } => {
                NodeStack::from_rows(&(0..n).map(|_| uniform(*half_width)).collect::<Vec<_>>())
            }
            Self::Explicit { x } => x.clone(),
        }
    }
}

/// Trace column used for stopping and first-hit queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMetric {
    RelErr,
    AvgCost,
    Distance,
    Disagreement,
}

impl TargetMetric {
    pub fn of(&self, r: &TraceRow) -> f64 {
        match self {
            Self::RelErr => r.rel_err,
            Self::AvgCost => r.avg_cost,
            Self::Distance => r.dist_to_xbullet,
            Self::Disagreement => r.disagreement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub metric: TargetMetric,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub alpha: f64,
    pub schedule: ActivationSchedule,
    /// Maximum number of iterations.
    pub budget: u64,
    pub init: InitMode,
    pub target: Option<Target>,
    /// Stop as soon as the target is met instead of running the full budget.
    pub stop_at_target: bool,
    /// Record `‖e^(k)‖²` (idling and standard only).
    pub record_error_norm: bool,
    /// Record `f(x̄_ra^(k)) − f⋆`.
    pub record_running_average: bool,
    pub seed: u64,
    pub replica: u64,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, alpha: f64, schedule: ActivationSchedule, budget: u64) -> Self {
        Self {
            algorithm,
            alpha,
            schedule,
            budget,
            init: InitMode::Zero,
            target: None,
            stop_at_target: false,
            record_error_norm: false,
            record_running_average: false,
            seed: 0,
            replica: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetReached,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: Trace,
    pub stop: StopReason,
    /// First iteration meeting the target, if any.
    pub target_hit: Option<u64>,
    pub x_final: NodeStack,
    pub x_initial: NodeStack,
}

/// Runs one sample path. Random streams are keyed by `(seed, replica)`.
pub fn run(
    cfg: &RunConfig,
    inst: &ProblemInstance,
    net: &Network,
    c: &WeightMatrix,
    oracle: &OracleValues,
) -> Result<RunOutcome, MetricError> {
    oracle.validate()?;
    let n = inst.nodes();
    let x0 = cfg.init.draw(inst, &mut stream(cfg.seed, cfg.replica, Purpose::Init));
    let mut act_rng = stream(cfg.seed, cfg.replica, Purpose::Activation);
    let mut async_rng = stream(cfg.seed, cfg.replica, Purpose::Async);
    let mut gossip_rng = stream(cfg.seed, cfg.replica, Purpose::Gossip);
    let mut state = RunState::new(x0.clone());
    let mut rows = vec![TraceRow::measure(0, &state.x, inst, oracle, 0, n)?];
    let hit = |r: &TraceRow| cfg.target.is_some_and(|t| t.metric.of(r) <= t.eps);
    let mut target_hit = hit(&rows[0]).then_some(0);
    let mut stop = StopReason::BudgetExhausted;
    let standard = matches!(cfg.algorithm, Algorithm::Standard);

    for k in 0..cfg.budget {
        if target_hit.is_some() && cfg.stop_at_target {
            stop = StopReason::TargetReached;
            break;
        }
        let p_k = if standard { 1.0 } else { cfg.schedule.probability(k) };
        let z = match cfg.algorithm {
            Algorithm::Standard | Algorithm::Gossip => ActivationVector::all(n, k, true),
            Algorithm::Idling | Algorithm::Async(_) => draw_activations(p_k, n, k, &mut act_rng),
        };
        if cfg.record_error_norm && matches!(cfg.algorithm, Algorithm::Standard | Algorithm::Idling) {
            let e = error_vector(&state.x, inst, c, cfg.alpha, &z, p_k);
            rows[k as usize].error_norm_sq = e.norm().powi(2);
        }
        let active = match &cfg.algorithm {
            Algorithm::Standard => {
                step_standard(&mut state, inst, c, cfg.alpha);
                n
            }
            Algorithm::Idling => {
                step_idling(&mut state, inst, c, cfg.alpha, &z, p_k);
                z.active_count()
            }
            Algorithm::Async(acfg) => {
                let bits = draw_async(acfg, &mut async_rng);
                step_async(&mut state, inst, net, c, cfg.alpha, &z, &bits, p_k);
                z.active_count()
            }
            Algorithm::Gossip => {
                step_gossip(&mut state, inst, net, cfg.alpha, &mut gossip_rng);
                2
            }
        };
        let mut row = TraceRow::measure(state.k, &state.x, inst, oracle, state.total_cost, active)?;
        if cfg.record_running_average {
            if let (Some(ra), Some(f)) = (state.running_average(), oracle.f_star) {
                row.ra_gap = inst.model.global_value(&ra.mean_row()) - f;
            }
        }
        if target_hit.is_none() && hit(&row) {
            target_hit = Some(state.k);
        }
        rows.push(row);
    }
    if target_hit.is_some() && cfg.stop_at_target {
        stop = StopReason::TargetReached;
    }
    Ok(RunOutcome { trace: Trace { rows }, stop, target_hit, x_final: state.x, x_initial: x0 })
}
