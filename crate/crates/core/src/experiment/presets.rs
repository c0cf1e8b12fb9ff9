//! Named experiment configurations.

use super::config::*;
use crate::costs::LipschitzRule;
use crate::engine::{InitMode, TargetMetric};
use crate::schedule::{ActivationSchedule, DEFAULT_DELTA_CAP};
use crate::{Error, Result};

pub const PRESET_NAMES: [&str; 7] = ["fig1", "fig2", "fig3ab", "fig3c", "fig3d", "table1", "remark2"];

/// Instance whose edge count, `L` and standard-method hitting times sit
/// closest to the reference synthetic instance.
const SEED: u64 = 50;

/// Quadratic instance whose standard-method iteration counts sit closest to
/// the reference counts.
const TABLE_SEED: u64 = 36;

fn fig1() -> SimulationConfig {
    SimulationConfig {
        name: "fig1".into(),
        graph: GraphSpec::RandomGeometric { nodes: 50, radius: None, target_edges: Some(214.0) },
        weights: WeightSpec::Metropolis { pd: PdRule::Auto { kappa: 0.1 } },
        problem: ProblemSpec::SyntheticLogistic {
            per_node: 2,
            feature_dim: 3,
            noise_sd: 0.1,
            radius: 100.0,
            reg: 0.1,
            lipschitz: LipschitzRule::NetworkAverage,
        },
        alpha: AlphaRule::InverseL { factor: 50.0 },
        schedule: ScheduleSpec::GeometricFromAlpha { cap: DEFAULT_DELTA_CAP },
        algorithms: vec![
            LabeledAlgorithm::new("standard", AlgorithmSpec::Standard),
            LabeledAlgorithm::new("idling", AlgorithmSpec::Idling),
        ],
        metric: TargetMetric::RelErr,
        target_eps: Some(0.01),
        budget: 3000,
        replicas: 100,
        seed: SEED,
        init: InitMode::PerNodeUniform { half_width: 50.0 },
        histogram_bins: DEFAULT_BINS,
        record_error_norm: true,
        record_running_average: false,
        oracle_budget: crate::oracle::DEFAULT_BUDGET,
    }
}

fn fig2() -> SimulationConfig {
    SimulationConfig {
        name: "fig2".into(),
        alpha: AlphaRule::InverseL { factor: 250.0 },
        target_eps: Some(0.005),
        budget: 4000,
        ..fig1()
    }
}

fn fig3ab() -> SimulationConfig {
    SimulationConfig {
        name: "fig3ab".into(),
        problem: ProblemSpec::Libsvm {
            path: None,
            feature_dim: 119,
            radius: 100.0,
            reg: 0.1,
            lipschitz: LipschitzRule::PerNodeMax,
            shuffle: false,
        },
        schedule: ScheduleSpec::CappedFromAlpha { floor: 0.1, cap: DEFAULT_DELTA_CAP },
        algorithms: vec![
            LabeledAlgorithm::new("standard", AlgorithmSpec::Standard),
            LabeledAlgorithm { replicas: Some(1), ..LabeledAlgorithm::new("idling", AlgorithmSpec::Idling) },
        ],
        metric: TargetMetric::AvgCost,
        target_eps: None,
        budget: 3000,
        replicas: 1,
        init: InitMode::Zero,
        record_error_norm: false,
        ..fig1()
    }
}

fn fig3c() -> SimulationConfig {
    SimulationConfig {
        name: "fig3c".into(),
        algorithms: vec![
            LabeledAlgorithm::new("idling", AlgorithmSpec::Idling),
            LabeledAlgorithm::new("async_lo", AlgorithmSpec::Async { link_up: 0.5, grad_success: vec![0.9, 0.5] }),
            LabeledAlgorithm::new("async_hi", AlgorithmSpec::Async { link_up: 0.5, grad_success: vec![0.9, 0.1] }),
        ],
        record_error_norm: false,
        ..fig1()
    }
}

fn fig3d() -> SimulationConfig {
    SimulationConfig {
        name: "fig3d".into(),
        algorithms: vec![
            LabeledAlgorithm::new("idling", AlgorithmSpec::Idling),
            LabeledAlgorithm::new("gossip", AlgorithmSpec::Gossip),
        ],
        replicas: 20,
        budget: 5000,
        record_error_norm: false,
        ..fig1()
    }
}

fn table1() -> TableConfig {
    TableConfig {
        name: "table1".into(),
        graph: GraphSpec::RandomGeometric { nodes: 4, radius: Some(0.8), target_edges: None },
        lo: 0.0,
        hi: 5.0,
        dim: 1,
        alphas: [-1.5, -2.0, -2.5, -3.0, -3.5, -4.0].iter().map(|e| 10f64.powf(*e)).collect(),
        seed: TABLE_SEED,
        replicas: 1,
        budget_factor: 4.0,
    }
}

fn remark2() -> SimulationConfig {
    SimulationConfig {
        name: "remark2".into(),
        graph: GraphSpec::Path { nodes: 2 },
        weights: WeightSpec::Metropolis { pd: PdRule::Always { kappa: 0.1 } },
        problem: ProblemSpec::ScalarSquare,
        alpha: AlphaRule::Absolute { value: 0.1 },
        schedule: ScheduleSpec::Fixed { schedule: ActivationSchedule::AlwaysOn },
        algorithms: vec![LabeledAlgorithm::new("standard", AlgorithmSpec::Standard)],
        metric: TargetMetric::Distance,
        target_eps: None,
        budget: 50,
        replicas: 1,
        seed: SEED,
        init: InitMode::Constant { value: 1.0 },
        histogram_bins: DEFAULT_BINS,
        record_error_norm: false,
        record_running_average: false,
        oracle_budget: crate::oracle::DEFAULT_BUDGET,
    }
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    Ok(match name {
        "fig1" => ExperimentConfig::Simulation(fig1()),
        "fig2" => ExperimentConfig::Simulation(fig2()),
        "fig3ab" => ExperimentConfig::Simulation(fig3ab()),
        "fig3c" => ExperimentConfig::Simulation(fig3c()),
        "fig3d" => ExperimentConfig::Simulation(fig3d()),
        "table1" => ExperimentConfig::QuadraticTable(table1()),
        "remark2" => ExperimentConfig::Simulation(remark2()),
        other => return Err(Error::UnknownPreset(other.into())),
    })
}
