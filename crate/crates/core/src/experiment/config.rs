//! Experiment configuration as read from JSON files.

use serde::{Deserialize, Serialize};

use crate::costs::LipschitzRule;
use crate::engine::{InitMode, TargetMetric};
use crate::schedule::ActivationSchedule;

pub const DEFAULT_BINS: usize = 20;

/// Contents of a `run --config` file: a preset with overrides, or a full
/// experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigFile {
    Preset(PresetRef),
    Full(ExperimentConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetRef {
    pub preset: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub replicas: Option<u64>,
    /// LIBSVM file for presets that read one.
    #[serde(default)]
    pub data_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Simulation(SimulationConfig),
    QuadraticTable(TableConfig),
}

impl ExperimentConfig {
    pub fn name(&self) -> &str {
        match self {
            Self::Simulation(s) => &s.name,
            Self::QuadraticTable(t) => &t.name,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::Simulation(s) => s.seed = seed,
            Self::QuadraticTable(t) => t.seed = seed,
        }
    }

    pub fn set_replicas(&mut self, replicas: u64) {
        match self {
            Self::Simulation(s) => s.replicas = replicas,
            Self::QuadraticTable(t) => t.replicas = replicas,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            Self::Simulation(s) => s.validate(),
            Self::QuadraticTable(t) => t.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    /// Either `radius` or `target_edges` (expected edge count) must be set.
    RandomGeometric {
        nodes: usize,
        #[serde(default)]
        radius: Option<f64>,
        #[serde(default)]
        target_edges: Option<f64>,
    },
    Path { nodes: usize },
    Cycle { nodes: usize },
    Complete { nodes: usize },
    EdgeList { path: String },
}

impl GraphSpec {
    pub fn nodes(&self) -> Option<usize> {
        match self {
            Self::RandomGeometric { nodes, .. }
            | Self::Path { nodes }
            | Self::Cycle { nodes }
            | Self::Complete { nodes } => Some(*nodes),
            Self::EdgeList { .. } => None,
        }
    }
}

/// When to apply the positive-definite shift to Metropolis weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "when", rename_all = "snake_case")]
pub enum PdRule {
    /// Only if `λ_N(C) < α·L`.
    Auto { kappa: f64 },
    Always { kappa: f64 },
    Never,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Metropolis { pd: PdRule },
    /// `C = I − c0·𝓛`; `c0` defaults to `1/(2N)`.
    Equal {
        #[serde(default)]
        c0: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    SyntheticLogistic {
        per_node: usize,
        feature_dim: usize,
        noise_sd: f64,
        radius: f64,
        reg: f64,
        lipschitz: LipschitzRule,
    },
    /// Falls back to the bundled fixture when `path` is absent.
    Libsvm {
        #[serde(default)]
        path: Option<String>,
        feature_dim: usize,
        radius: f64,
        reg: f64,
        lipschitz: LipschitzRule,
        #[serde(default)]
        shuffle: bool,
    },
    /// `f_i(x) = ½‖x − b_i‖²`, `b_i` uniform on `[lo, hi]^dim`.
    Quadratic { lo: f64, hi: f64, dim: usize, radius: f64 },
    /// `f_i(x) = x²/2` on `[−2, 2]`.
    ScalarSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaRule {
    Absolute { value: f64 },
    /// `α = 1/(factor·L)`.
    InverseL { factor: f64 },
    /// `α = λ_N(C)/L`.
    LambdaN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleSpec {
    /// Geometric with `δ = min{(1 − αμ)², cap}`.
    GeometricFromAlpha { cap: f64 },
    /// Capped geometric with `δ = min{(1 − αμ)², cap}` and a floor.
    CappedFromAlpha { floor: f64, cap: f64 },
    Fixed { schedule: ActivationSchedule },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    Standard,
    Idling,
    /// Nodes are split into `grad_success.len()` contiguous groups of equal
    /// size; group `g` succeeds with probability `grad_success[g]`.
    Async { link_up: f64, grad_success: Vec<f64> },
    Gossip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledAlgorithm {
    pub label: String,
    pub spec: AlgorithmSpec,
    /// Overrides the experiment's replica count.
    #[serde(default)]
    pub replicas: Option<u64>,
    /// Overrides the experiment's schedule.
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
}

impl LabeledAlgorithm {
    pub fn new(label: &str, spec: AlgorithmSpec) -> Self {
        Self { label: label.into(), spec, replicas: None, schedule: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub name: String,
    pub graph: GraphSpec,
    pub weights: WeightSpec,
    pub problem: ProblemSpec,
    pub alpha: AlphaRule,
    pub schedule: ScheduleSpec,
    pub algorithms: Vec<LabeledAlgorithm>,
    /// Metric compared against `target_eps`.
    pub metric: TargetMetric,
    #[serde(default)]
    pub target_eps: Option<f64>,
    pub budget: u64,
    pub replicas: u64,
    pub seed: u64,
    /// Drawn once and shared by every replica and algorithm.
    pub init: InitMode,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    #[serde(default)]
    pub record_error_norm: bool,
    #[serde(default)]
    pub record_running_average: bool,
    /// Reference values use this many fixed-point iterations at most.
    #[serde(default = "default_oracle_budget")]
    pub oracle_budget: u64,
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_oracle_budget() -> u64 {
    crate::oracle::DEFAULT_BUDGET
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.replicas < 1 {
            return Err("replicas: must be at least 1".into());
        }
        if self.budget < 1 {
            return Err("budget: must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return Err("algorithms: at least one is required".into());
        }
        if self.histogram_bins < 1 {
            return Err("histogram_bins: must be at least 1".into());
        }
        if let GraphSpec::RandomGeometric { radius: None, target_edges: None, .. } = self.graph {
            return Err("graph: random_geometric needs radius or target_edges".into());
        }
        if let Some(n) = self.graph.nodes() {
            if n < 2 {
                return Err("graph.nodes: must be at least 2".into());
            }
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if a.replicas == Some(0) {
                return Err(format!("algorithms[{i}].replicas: must be at least 1"));
            }
            if let AlgorithmSpec::Async { link_up, grad_success } = &a.spec {
                let ok = |p: &f64| (0.0..=1.0).contains(p);
                if !ok(link_up) || grad_success.is_empty() || !grad_success.iter().all(ok) {
                    return Err(format!("algorithms[{i}]: async probabilities must lie in [0, 1]"));
                }
            }
        }
        match self.alpha {
            AlphaRule::Absolute { value } if value <= 0.0 => Err("alpha.value: must be positive".into()),
            AlphaRule::InverseL { factor } if factor <= 0.0 => Err("alpha.factor: must be positive".into()),
            _ => Ok(()),
        }
    }
}

/// Quadratic cost-to-accuracy comparison over a grid of step sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub name: String,
    pub graph: GraphSpec,
    /// `b_i` uniform on `[lo, hi]^dim`.
    pub lo: f64,
    pub hi: f64,
    pub dim: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    /// Sample paths of the idling method per step size.
    pub replicas: u64,
    /// Iteration cap as a multiple of `K_ε`.
    pub budget_factor: f64,
}

impl TableConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.alphas.is_empty() || self.alphas.iter().any(|a| *a <= 0.0) {
            return Err("alphas: need at least one positive step size".into());
        }
        if self.replicas < 1 {
            return Err("replicas: must be at least 1".into());
        }
        if !(self.lo < self.hi) || self.dim < 1 {
            return Err("centers: need lo < hi and dim >= 1".into());
        }
        if self.budget_factor < 1.0 {
            return Err("budget_factor: must be at least 1".into());
        }
        Ok(())
    }
}
