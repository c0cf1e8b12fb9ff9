//! Histograms and the on-disk output bundle.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use super::{ExperimentResult, SimulationResult, TableResult};
use crate::checks::{simulation_checks, CheckResult};
use crate::oracle::Bounds;
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `bins + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Equal-width bins over `[min, max]`; the last bin is closed on the right.
/// A constant sample lands entirely in the first bin.
pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::Config("histogram: no values".into()));
    }
    if bins == 0 {
        return Err(Error::Config("histogram: bins must be at least 1".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins).map(|b| if b == bins { hi } else { lo + width * b as f64 }).collect();
    let mut counts = vec![0u64; bins];
    for v in values {
        let b = if width > 0.0 { (((v - lo) / width) as usize).min(bins - 1) } else { 0 };
        counts[b] += 1;
    }
    Ok(Histogram { edges, counts })
}

#[derive(Debug, Serialize)]
struct AlgorithmSummary<'a> {
    label: &'a str,
    algorithm: &'a str,
    replicas: usize,
    p_k_formula: String,
    delta: Option<f64>,
    hits: Option<usize>,
    mean_cost_to_target: Option<f64>,
    mean_iterations_to_target: Option<f64>,
    final_mean_rel_err: f64,
    final_mean_avg_cost: f64,
    final_mean_dist_to_xbullet: f64,
    final_mean_total_cost: f64,
}

#[derive(Debug, Serialize)]
struct OracleSummary<'a> {
    f_star: f64,
    x_star: &'a [f64],
    centralized_residual: f64,
    centralized_iterations: u64,
    penalty_residual: f64,
    penalty_iterations: u64,
}

#[derive(Debug, Serialize)]
struct SimulationReport<'a> {
    schema_version: u32,
    kind: &'static str,
    name: &'a str,
    seed: u64,
    data_source: &'a str,
    nodes: usize,
    edges: usize,
    pd_applied: bool,
    alpha: f64,
    delta: Option<f64>,
    p_k_formula: String,
    bounds: &'a Bounds,
    oracle: OracleSummary<'a>,
    algorithms: Vec<AlgorithmSummary<'a>>,
    savings_percent: Option<f64>,
    iteration_overhead_percent: Option<f64>,
    checks: Vec<CheckResult>,
}

#[derive(Debug, Serialize)]
struct TableReport<'a> {
    schema_version: u32,
    kind: &'static str,
    #[serde(flatten)]
    table: &'a TableResult,
}

fn last(v: &[f64]) -> f64 {
    v.last().copied().unwrap_or(f64::NAN)
}

fn simulation_report(res: &SimulationResult) -> SimulationReport<'_> {
    let s = &res.setting;
    let algorithms = res
        .algorithms
        .iter()
        .map(|a| AlgorithmSummary {
            label: &a.label,
            algorithm: a.algorithm.name(),
            replicas: a.outcomes.len(),
            p_k_formula: a.schedule.formula(),
            delta: a.schedule.delta(),
            hits: a.hits.as_ref().map(|h| h.hits),
            mean_cost_to_target: a.hits.as_ref().and_then(|h| h.mean_cost),
            mean_iterations_to_target: a.hits.as_ref().and_then(|h| h.mean_iterations),
            final_mean_rel_err: last(&a.aggregate.rel_err.mean),
            final_mean_avg_cost: last(&a.aggregate.avg_cost.mean),
            final_mean_dist_to_xbullet: last(&a.aggregate.dist_to_xbullet.mean),
            final_mean_total_cost: last(&a.aggregate.total_cost.mean),
        })
        .collect();
    let idling = res.algorithms.iter().find(|a| a.algorithm.name() == "idling").map(|a| a.label.as_str());
    SimulationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        kind: "simulation",
        name: &res.config.name,
        seed: res.config.seed,
        data_source: &s.data_source,
        nodes: s.net.nodes(),
        edges: s.net.edge_count(),
        pd_applied: s.pd_applied,
        alpha: s.alpha,
        delta: s.schedule.delta(),
        p_k_formula: s.schedule.formula(),
        bounds: &s.bounds,
        oracle: OracleSummary {
            f_star: s.centralized.f_star,
            x_star: &s.centralized.x_star,
            centralized_residual: s.centralized.residual,
            centralized_iterations: s.centralized.iterations,
            penalty_residual: s.penalty.residual,
            penalty_iterations: s.penalty.iterations,
        },
        algorithms,
        savings_percent: idling.and_then(|l| res.savings_percent(l)),
        iteration_overhead_percent: idling.and_then(|l| res.iteration_overhead_percent(l)),
        checks: simulation_checks(res),
    }
}

/// Report JSON for either experiment kind.
pub fn report_json(result: &ExperimentResult) -> Result<String> {
    Ok(match result {
        ExperimentResult::Simulation(s) => serde_json::to_string_pretty(&simulation_report(s))?,
        ExperimentResult::Table(t) => {
            serde_json::to_string_pretty(&TableReport { schema_version: REPORT_SCHEMA_VERSION, kind: "quadratic_table", table: t })?
        }
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn write_histogram(path: &Path, h: &Histogram) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["lo", "hi", "count"])?;
    for (b, c) in h.counts.iter().enumerate() {
        w.write_record([h.edges[b].to_string(), h.edges[b + 1].to_string(), c.to_string()])?;
    }
    w.flush().map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(())
}

fn write_simulation(res: &SimulationResult, dir: &Path) -> Result<()> {
    for a in &res.algorithms {
        for (r, o) in a.outcomes.iter().enumerate() {
            let path = dir.join(format!("trace_{}_{r:04}.csv", a.label));
            o.trace.write_csv(create(&path)?)?;
        }
        let path = dir.join(format!("aggregate_{}.csv", a.label));
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record([
            "k",
            "rel_err",
            "rel_err_se",
            "avg_cost",
            "avg_cost_se",
            "disagreement",
            "dist_to_xbullet",
            "dist_to_xbullet_se",
            "total_cost",
            "active_count",
            "error_norm_sq",
        ])?;
        let g = &a.aggregate;
        for k in 0..g.len() {
            w.write_record(
                [
                    g.k[k] as f64,
                    g.rel_err.mean[k],
                    g.rel_err.se[k],
                    g.avg_cost.mean[k],
                    g.avg_cost.se[k],
                    g.disagreement.mean[k],
                    g.dist_to_xbullet.mean[k],
                    g.dist_to_xbullet.se[k],
                    g.total_cost.mean[k],
                    g.active_count.mean[k],
                    g.error_norm_sq.mean[k],
                ]
                .map(|v| v.to_string()),
            )?;
        }
        w.flush().map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        if let Some(h) = a.hits.as_ref().filter(|h| h.hits > 0) {
            write_histogram(&dir.join(format!("hist_cost_{}.csv", a.label)), &histogram(&h.costs, res.config.histogram_bins)?)?;
            write_histogram(
                &dir.join(format!("hist_iterations_{}.csv", a.label)),
                &histogram(&h.iterations, res.config.histogram_bins)?,
            )?;
        }
    }
    Ok(())
}

fn write_table(t: &TableResult, dir: &Path) -> Result<()> {
    let path = dir.join("table.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    for row in &t.rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(())
}

/// Writes traces, aggregates, histograms and `report.json` under `dir`.
pub fn write_bundle(result: &ExperimentResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    match result {
        ExperimentResult::Simulation(s) => write_simulation(s, dir)?,
        ExperimentResult::Table(t) => write_table(t, dir)?,
    }
    let path = dir.join("report.json");
    fs::write(&path, report_json(result)?).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample_one_bin() {
        assert_eq!(histogram(&[1.0, 1.0, 1.0], 1).unwrap().counts, vec![3]);
    }

    #[test]
    fn two_bins_split_evenly() {
        let h = histogram(&[0.0, 1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(h.counts, vec![2, 2]);
        assert_eq!(h.edges, vec![0.0, 1.5, 3.0]);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(histogram(&[], 3).is_err());
    }

    #[test]
    fn counts_sum_to_len() {
        let v: Vec<f64> = (0..100).map(|i| ((i * 37) % 101) as f64).collect();
        assert_eq!(histogram(&v, 20).unwrap().counts.iter().sum::<u64>(), 100);
    }
}
