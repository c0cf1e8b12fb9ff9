//! Cost to reach `ε(α)` on identity-Hessian quadratics, across step sizes.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ProblemSpec, TableConfig};
use super::setting::{build_instance, build_network};
use crate::engine::{run, Algorithm, InitMode, OracleValues, RunConfig, Target, TargetMetric};
use crate::graph::{equal_weights, Network, Spectrum, WeightMatrix};
use crate::oracle::{quadratic_bounds, QuadraticBounds, QuadraticSetup};
use crate::schedule::ActivationSchedule;
use crate::stack::NodeStack;
use crate::{Error, Result};

/// Effectively unconstrained.
const TABLE_RADIUS: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub alpha: f64,
    pub epsilon: f64,
    pub k_epsilon: f64,
    pub delta: f64,
    /// `1/(2αθ)`.
    pub predicted_savings: f64,
    /// Mean over sample paths that reached `ε`.
    pub prop_cost: Option<f64>,
    pub prop_iterations: Option<f64>,
    pub prop_hits: usize,
    pub stand_cost: Option<u64>,
    pub stand_iterations: Option<u64>,
    /// Idles for `⌈1/(2αθ)⌉` iterations, then runs the standard method.
    pub naive_cost: Option<u64>,
    pub naive_iterations: Option<u64>,
    /// `stand_cost − prop_cost`.
    pub cost_difference: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableResult {
    pub config: TableConfig,
    pub nodes: usize,
    pub c0: f64,
    pub lambda2_l: f64,
    pub theta: f64,
    pub r_sp: f64,
    pub r_0: f64,
    pub rows: Vec<TableRow>,
    /// Slope of `log cost_difference` against `log α`.
    pub slope: Option<f64>,
}

/// Least-squares slope of `ln y` against `ln x`; `None` unless every point is
/// positive and there are at least two.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Some(sxy / sxx)
}

struct Fixed {
    net: Network,
    c: WeightMatrix,
    inst: crate::costs::ProblemInstance,
    centers: NodeStack,
    c0: f64,
    lambda2_l: f64,
    theta: f64,
}

fn fixed_part(cfg: &TableConfig) -> Result<Fixed> {
    let net = build_network(&cfg.graph, cfg.seed)?;
    let n = net.nodes();
    let spec = ProblemSpec::Quadratic { lo: cfg.lo, hi: cfg.hi, dim: cfg.dim, radius: TABLE_RADIUS };
    let (inst, _) = build_instance(&spec, n, cfg.seed)?;
    let centers = match &inst.model {
        crate::costs::CostModel::QuadraticIdentity(q) => q.centers().clone(),
        _ => unreachable!("quadratic spec builds quadratic costs"),
    };
    let c0 = 1.0 / (2.0 * n as f64);
    let c = equal_weights(&net, c0)?;
    let lambda2_l = Spectrum::compute(&c, &net)?.laplacian_lambda2();
    Ok(Fixed { net, c, inst, centers, c0, lambda2_l, theta: 1.0 / (c0 * lambda2_l) })
}

fn table_row(cfg: &TableConfig, f: &Fixed, alpha: f64) -> Result<(TableRow, QuadraticBounds)> {
    let n = f.net.nodes();
    let setup = QuadraticSetup {
        centers: f.centers.clone(),
        c0: f.c0,
        lambda2_l: f.lambda2_l,
        theta: f.theta,
        alpha,
        x0: NodeStack::zeros(n, cfg.dim),
    };
    let qb = quadratic_bounds(&setup)?;
    let eps = qb.epsilon_for_alpha();
    let k_eps = qb.k_epsilon(eps);
    let oracle = OracleValues { f_star: None, x_bullet: Some(setup.b_star()) };
    let base = RunConfig {
        algorithm: Algorithm::Standard,
        alpha,
        schedule: ActivationSchedule::AlwaysOn,
        budget: (cfg.budget_factor * k_eps).ceil().max(1.0) as u64,
        init: InitMode::Zero,
        target: Some(Target { metric: TargetMetric::Distance, eps }),
        stop_at_target: true,
        record_error_norm: false,
        record_running_average: false,
        seed: cfg.seed,
        replica: 0,
    };
    fn hit_of(out: &crate::engine::RunOutcome) -> Option<&crate::engine::TraceRow> {
        out.target_hit.map(|k| &out.trace.rows[k as usize])
    }

    let stand = run(&base, &f.inst, &f.net, &f.c, &oracle)?;
    let stand_hit = hit_of(&stand).map(|r| (r.total_cost, r.k));

    let idling = RunConfig { algorithm: Algorithm::Idling, schedule: setup.schedule(), ..base };
    let props: Vec<(f64, f64)> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let out = run(&RunConfig { replica: r, ..idling.clone() }, &f.inst, &f.net, &f.c, &oracle)?;
            Ok::<_, Error>(hit_of(&out).map(|row| (row.total_cost as f64, row.k as f64)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mean = |v: &mut dyn Iterator<Item = f64>| {
        let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
        (c > 0).then(|| s / c as f64)
    };
    let prop_cost = mean(&mut props.iter().map(|p| p.0));
    let prop_iterations = mean(&mut props.iter().map(|p| p.1));
    let idle = qb.predicted_savings.ceil() as u64;
    let row = TableRow {
        alpha,
        epsilon: eps,
        k_epsilon: k_eps,
        delta: qb.delta,
        predicted_savings: qb.predicted_savings,
        prop_cost,
        prop_iterations,
        prop_hits: props.len(),
        stand_cost: stand_hit.map(|h| h.0),
        stand_iterations: stand_hit.map(|h| h.1),
        naive_cost: stand_hit.map(|h| h.0),
        naive_iterations: stand_hit.map(|h| h.1 + idle),
        cost_difference: prop_cost.zip(stand_hit).map(|(p, s)| s.0 as f64 - p),
    };
    Ok((row, qb))
}

/// Closed-form quantities for every step size, without sample paths.
pub fn table_bounds(cfg: &TableConfig) -> Result<Vec<QuadraticBounds>> {
    cfg.validate().map_err(Error::Config)?;
    let f = fixed_part(cfg)?;
    cfg.alphas
        .iter()
        .map(|&alpha| {
            let setup = QuadraticSetup {
                centers: f.centers.clone(),
                c0: f.c0,
                lambda2_l: f.lambda2_l,
                theta: f.theta,
                alpha,
                x0: NodeStack::zeros(f.net.nodes(), cfg.dim),
            };
            Ok(quadratic_bounds(&setup)?)
        })
        .collect()
}

pub fn run_table(cfg: &TableConfig) -> Result<TableResult> {
    cfg.validate().map_err(Error::Config)?;
    let f = fixed_part(cfg)?;
    let mut rows = Vec::with_capacity(cfg.alphas.len());
    let mut r = (0.0, 0.0);
    for &alpha in &cfg.alphas {
        let (row, qb) = table_row(cfg, &f, alpha)?;
        r = (qb.r_sp, qb.r_0);
        rows.push(row);
    }
    let diffs: Option<Vec<f64>> = rows.iter().map(|r| r.cost_difference).collect();
    let slope = diffs.and_then(|d| loglog_slope(&cfg.alphas, &d));
    Ok(TableResult {
        config: cfg.clone(),
        nodes: f.net.nodes(),
        c0: f.c0,
        lambda2_l: f.lambda2_l,
        theta: f.theta,
        r_sp: r.0,
        r_0: r.1,
        rows,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::GraphSpec;

    #[test]
    fn slope_of_power_law() {
        let x = [1e-1, 1e-2, 1e-3];
        let y: Vec<f64> = x.iter().map(|a| 3.0 / a).collect();
        assert!((loglog_slope(&x, &y).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&x, &[1.0, -1.0, 2.0]), None);
    }

    #[test]
    fn standard_cost_is_n_times_iterations() {
        let cfg = TableConfig {
            name: "t".into(),
            graph: GraphSpec::Path { nodes: 4 },
            lo: 0.0,
            hi: 5.0,
            dim: 1,
            alphas: vec![10f64.powf(-1.5)],
            seed: 3,
            replicas: 2,
            budget_factor: 4.0,
        };
        let t = run_table(&cfg).unwrap();
        let row = &t.rows[0];
        assert_eq!(row.stand_cost.unwrap(), 4 * row.stand_iterations.unwrap());
        assert!((t.theta - 1.0 / (t.c0 * t.lambda2_l)).abs() < 1e-12);
    }
}
