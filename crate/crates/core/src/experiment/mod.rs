//! Config-driven Monte-Carlo experiments with machine-readable outputs.
//!
//! A simulation fixes the network, data, step size, schedule, `x^(0)` and
//! reference solutions once, then runs every algorithm over independent
//! replicas. Replicas differ only in their random streams, which are keyed
//! by replica index, so results are identical for any worker count.

mod config;
mod output;
mod presets;
mod setting;
mod table;

pub use config::*;
pub use output::{histogram, report_json, write_bundle, Histogram, REPORT_SCHEMA_VERSION};
pub use presets::{preset, PRESET_NAMES};
pub use setting::{build_instance, build_network, build_setting, resolve_schedule, Setting, FIXTURE_LIBSVM, FIXTURE_MARKER};
pub use table::{loglog_slope, run_table, table_bounds, TableResult, TableRow};

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run, Algorithm, InitMode, OracleValues, RunConfig, RunOutcome, Target, TraceRow};
use crate::schedule::{ActivationSchedule, AsyncConfig};
use crate::stack::NodeStack;
use crate::{Error, Result};

/// Per-iteration mean and standard error over replicas.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MeanSe {
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
}

impl MeanSe {
    fn from_samples(len: usize, outcomes: &[RunOutcome], f: impl Fn(&TraceRow) -> f64) -> Self {
        let r = outcomes.len() as f64;
        let mut out = Self { mean: Vec::with_capacity(len), se: Vec::with_capacity(len) };
        for k in 0..len {
            let vals = outcomes.iter().map(|o| f(&o.trace.rows[k]));
            let (s, s2) = vals.fold((0.0, 0.0), |(a, b), v| (a + v, b + v * v));
            let mean = s / r;
            let var = if r > 1.0 { ((s2 - r * mean * mean) / (r - 1.0)).max(0.0) } else { 0.0 };
            out.mean.push(mean);
            out.se.push((var / r).sqrt());
        }
        out
    }

    /// `mean + z·se` at `k`.
    pub fn upper(&self, k: usize, z: f64) -> f64 {
        self.mean[k] + z * self.se[k]
    }
}

/// Mean curves over replicas, truncated to the shortest trace.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Aggregate {
    pub replicas: usize,
    pub k: Vec<u64>,
    pub rel_err: MeanSe,
    pub avg_cost: MeanSe,
    pub disagreement: MeanSe,
    pub disagreement_sq: MeanSe,
    pub dist_to_xbullet: MeanSe,
    pub total_cost: MeanSe,
    pub active_count: MeanSe,
    pub error_norm_sq: MeanSe,
    pub ra_gap: MeanSe,
}

impl Aggregate {
    pub fn from_outcomes(outcomes: &[RunOutcome]) -> Self {
        let len = outcomes.iter().map(|o| o.trace.len()).min().unwrap_or(0);
        let col = |f: fn(&TraceRow) -> f64| MeanSe::from_samples(len, outcomes, f);
        Self {
            replicas: outcomes.len(),
            k: (0..len as u64).collect(),
            rel_err: col(|r| r.rel_err),
            avg_cost: col(|r| r.avg_cost),
            disagreement: col(|r| r.disagreement),
            disagreement_sq: col(|r| r.disagreement * r.disagreement),
            dist_to_xbullet: col(|r| r.dist_to_xbullet),
            total_cost: col(|r| r.total_cost as f64),
            active_count: col(|r| r.active_count as f64),
            error_norm_sq: col(|r| r.error_norm_sq),
            ra_gap: col(|r| r.ra_gap),
        }
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }
}

/// Cost and iterations at the first target hit of each replica.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct HitStats {
    pub eps: f64,
    /// Replicas that met the target within the budget.
    pub hits: usize,
    pub costs: Vec<f64>,
    pub iterations: Vec<f64>,
    pub mean_cost: Option<f64>,
    pub mean_iterations: Option<f64>,
}

impl HitStats {
    fn from_outcomes(eps: f64, outcomes: &[RunOutcome]) -> Self {
        let hit_rows: Vec<&TraceRow> =
            outcomes.iter().filter_map(|o| o.target_hit.map(|k| &o.trace.rows[k as usize])).collect();
        let costs: Vec<f64> = hit_rows.iter().map(|r| r.total_cost as f64).collect();
        let iterations: Vec<f64> = hit_rows.iter().map(|r| r.k as f64).collect();
        let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        Self { eps, hits: hit_rows.len(), mean_cost: mean(&costs), mean_iterations: mean(&iterations), costs, iterations }
    }
}

#[derive(Debug, Clone)]
pub struct AlgorithmResult {
    pub label: String,
    pub algorithm: Algorithm,
    pub schedule: ActivationSchedule,
    pub outcomes: Vec<RunOutcome>,
    pub aggregate: Aggregate,
    pub hits: Option<HitStats>,
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub config: SimulationConfig,
    pub setting: Setting,
    pub algorithms: Vec<AlgorithmResult>,
}

impl SimulationResult {
    pub fn algorithm(&self, label: &str) -> Option<&AlgorithmResult> {
        self.algorithms.iter().find(|a| a.label == label)
    }

    /// `1 − cost(label)/cost(standard)` at the target, in percent.
    pub fn savings_percent(&self, label: &str) -> Option<f64> {
        let ours = self.algorithm(label)?.hits.as_ref()?.mean_cost?;
        let std = self.standard()?.hits.as_ref()?.mean_cost?;
        Some(100.0 * (1.0 - ours / std))
    }

    /// `iterations(label)/iterations(standard) − 1` at the target, in percent.
    pub fn iteration_overhead_percent(&self, label: &str) -> Option<f64> {
        let ours = self.algorithm(label)?.hits.as_ref()?.mean_iterations?;
        let std = self.standard()?.hits.as_ref()?.mean_iterations?;
        Some(100.0 * (ours / std - 1.0))
    }

    fn standard(&self) -> Option<&AlgorithmResult> {
        self.algorithms.iter().find(|a| matches!(a.algorithm, Algorithm::Standard))
    }
}

#[derive(Debug, Clone)]
pub enum ExperimentResult {
    Simulation(Box<SimulationResult>),
    Table(TableResult),
}

/// Splits nodes into contiguous groups, one per success probability.
fn async_config(net_edges: usize, nodes: usize, link_up: f64, groups: &[f64]) -> AsyncConfig {
    let g = groups.len();
    let grad_success = (0..nodes).map(|i| groups[(i * g / nodes).min(g - 1)]).collect();
    AsyncConfig { link_up: vec![link_up; net_edges], grad_success }
}

pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationResult> {
    let setting = build_setting(cfg)?;
    let f_star = setting.centralized.f_star;
    if cfg.metric == crate::engine::TargetMetric::RelErr && f_star <= 0.0 {
        return Err(Error::Metric(crate::engine::MetricError::NonPositiveOptimum(f_star)));
    }
    let oracle = OracleValues {
        f_star: (f_star > 0.0).then_some(f_star),
        x_bullet: Some(setting.penalty.x_bullet.clone()),
    };
    let mut algorithms = Vec::with_capacity(cfg.algorithms.len());
    for la in &cfg.algorithms {
        let schedule = la
            .schedule
            .map(|s| resolve_schedule(s, setting.alpha, setting.inst.mu))
            .unwrap_or(setting.schedule);
        let algorithm = match &la.spec {
            AlgorithmSpec::Standard => Algorithm::Standard,
            AlgorithmSpec::Idling => Algorithm::Idling,
            AlgorithmSpec::Async { link_up, grad_success } => Algorithm::Async(async_config(
                setting.net.edge_count(),
                setting.net.nodes(),
                *link_up,
                grad_success,
            )),
            AlgorithmSpec::Gossip => Algorithm::Gossip,
        };
        // the standard method is deterministic once x^(0) is fixed
        let replicas = match algorithm {
            Algorithm::Standard => 1,
            _ => la.replicas.unwrap_or(cfg.replicas),
        };
        let base = RunConfig {
            algorithm: algorithm.clone(),
            alpha: setting.alpha,
            schedule: if matches!(algorithm, Algorithm::Standard) { ActivationSchedule::AlwaysOn } else { schedule },
            budget: cfg.budget,
            init: InitMode::Explicit { x: setting.x0.clone() },
            target: cfg.target_eps.map(|eps| Target { metric: cfg.metric, eps }),
            stop_at_target: false,
            record_error_norm: cfg.record_error_norm,
            record_running_average: cfg.record_running_average,
            seed: cfg.seed,
            replica: 0,
        };
        let outcomes = run_replicas(&base, replicas, &setting, &oracle)?;
        let aggregate = Aggregate::from_outcomes(&outcomes);
        let hits = cfg.target_eps.map(|eps| HitStats::from_outcomes(eps, &outcomes));
        algorithms.push(AlgorithmResult {
            label: la.label.clone(),
            algorithm,
            schedule: base.schedule,
            outcomes,
            aggregate,
            hits,
        });
    }
    Ok(SimulationResult { config: cfg.clone(), setting, algorithms })
}

/// Runs replicas `0..count` in parallel; output order follows replica index.
pub fn run_replicas(base: &RunConfig, count: u64, setting: &Setting, oracle: &OracleValues) -> Result<Vec<RunOutcome>> {
    (0..count)
        .into_par_iter()
        .map(|r| {
            let cfg = RunConfig { replica: r, ..base.clone() };
            run(&cfg, &setting.inst, &setting.net, &setting.c, oracle).map_err(Error::from)
        })
        .collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate().map_err(Error::Config)?;
    match cfg {
        ExperimentConfig::Simulation(s) => Ok(ExperimentResult::Simulation(Box::new(run_simulation(s)?))),
        ExperimentConfig::QuadraticTable(t) => Ok(ExperimentResult::Table(run_table(t)?)),
    }
}

/// Resolves a config file into a concrete experiment.
pub fn resolve_config(file: ConfigFile) -> Result<ExperimentConfig> {
    match file {
        ConfigFile::Full(cfg) => Ok(cfg),
        ConfigFile::Preset(p) => {
            let mut cfg = preset(&p.preset)?;
            if let Some(seed) = p.seed {
                cfg.set_seed(seed);
            }
            if let Some(r) = p.replicas {
                cfg.set_replicas(r);
            }
            if let (Some(path), ExperimentConfig::Simulation(s)) = (p.data_path, &mut cfg) {
                if let ProblemSpec::Libsvm { path: slot, .. } = &mut s.problem {
                    *slot = Some(path);
                }
            }
            Ok(cfg)
        }
    }
}

pub fn load_config(path: &str) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let file: ConfigFile = serde_json::from_str(&text)?;
    resolve_config(file)
}

/// `x^(0)` as used by every replica.
pub fn initial_point(setting: &Setting) -> &NodeStack {
    &setting.x0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::TargetMetric;

    fn tiny(algorithms: Vec<LabeledAlgorithm>, replicas: u64) -> SimulationConfig {
        SimulationConfig {
            name: "tiny".into(),
            graph: GraphSpec::Cycle { nodes: 5 },
            weights: WeightSpec::Metropolis { pd: PdRule::Auto { kappa: 0.1 } },
            problem: ProblemSpec::Quadratic { lo: 0.0, hi: 5.0, dim: 2, radius: 100.0 },
            alpha: AlphaRule::Absolute { value: 0.05 },
            schedule: ScheduleSpec::GeometricFromAlpha { cap: 0.99999 },
            algorithms,
            metric: TargetMetric::RelErr,
            target_eps: Some(0.05),
            budget: 200,
            replicas,
            seed: 5,
            init: InitMode::PerNodeUniform { half_width: 10.0 },
            histogram_bins: 5,
            record_error_norm: false,
            record_running_average: false,
            oracle_budget: crate::oracle::DEFAULT_BUDGET,
        }
    }

    #[test]
    fn single_replica_aggregate_is_the_trace() {
        let cfg = tiny(vec![LabeledAlgorithm::new("standard", AlgorithmSpec::Standard)], 1);
        let res = run_simulation(&cfg).unwrap();
        let a = &res.algorithms[0];
        let t = &a.outcomes[0].trace;
        assert_eq!(a.aggregate.len(), t.len());
        for (k, r) in t.rows.iter().enumerate() {
            assert_eq!(a.aggregate.rel_err.mean[k], r.rel_err);
            assert_eq!(a.aggregate.total_cost.mean[k], 5.0 * k as f64);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = tiny(vec![LabeledAlgorithm::new("idling", AlgorithmSpec::Idling)], 4);
        let report = || report_json(&ExperimentResult::Simulation(Box::new(run_simulation(&cfg).unwrap()))).unwrap();
        assert_eq!(report(), report());
        let bits = |r: &SimulationResult| r.algorithms[0].aggregate.rel_err.mean.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&run_simulation(&cfg).unwrap()), bits(&run_simulation(&cfg).unwrap()));
    }

    #[test]
    fn async_groups_split_nodes() {
        let c = async_config(3, 4, 0.5, &[0.9, 0.1]);
        assert_eq!(c.grad_success, vec![0.9, 0.9, 0.1, 0.1]);
        assert_eq!(c.link_up, vec![0.5; 3]);
    }
}
