//! Per-iteration metrics and their CSV form.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::ProblemInstance;
use crate::stack::NodeStack;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("relative error needs a positive optimal value, got f* = {0}")]
    NonPositiveOptimum(f64),
}

/// Reference values metrics are measured against.
#[derive(Debug, Clone, Default)]
pub struct OracleValues {
    /// `f⋆`; without it `rel_err` is recorded as NaN.
    pub f_star: Option<f64>,
    /// `x^•`; without it `dist_to_xbullet` is recorded as NaN.
    pub x_bullet: Option<NodeStack>,
}

impl OracleValues {
    pub fn validate(&self) -> Result<(), MetricError> {
        match self.f_star {
            Some(f) if f <= 0.0 => Err(MetricError::NonPositiveOptimum(f)),
            _ => Ok(()),
        }
    }
}

/// Metrics of the iterate `x^(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: u64,
    /// `(1/N) Σ_i (f(x_i) − f⋆)/f⋆`.
    pub rel_err: f64,
    /// `(1/N) Σ_i f(x_i)`.
    pub avg_cost: f64,
    /// `‖x − 𝟏 ⊗ x̄‖`.
    pub disagreement: f64,
    pub dist_to_xbullet: f64,
    /// Activations spent to reach `x^(k)`.
    pub total_cost: u64,
    /// Active nodes at the step that produced `x^(k)`; `N` at `k = 0`.
    pub active_count: usize,
    /// `‖e^(k)‖²` of the step leaving `x^(k)`, NaN unless recorded.
    pub error_norm_sq: f64,
    /// `f(x̄_ra^(k)) − f⋆`, NaN unless recorded.
    pub ra_gap: f64,
}

impl TraceRow {
    pub fn measure(
        k: u64,
        x: &NodeStack,
        inst: &ProblemInstance,
        oracle: &OracleValues,
        total_cost: u64,
        active_count: usize,
    ) -> Result<Self, MetricError> {
        oracle.validate()?;
        let n = x.nodes();
        let avg_cost = x.rows().map(|r| inst.model.global_value(r)).sum::<f64>() / n as f64;
        let rel_err = oracle.f_star.map_or(f64::NAN, |f| (avg_cost - f) / f);
        let dist = oracle.x_bullet.as_ref().map_or(f64::NAN, |xb| x.distance(xb));
        Ok(Self {
            k,
            rel_err,
            avg_cost,
            disagreement: x.disagreement(),
            dist_to_xbullet: dist,
            total_cost,
            active_count,
            error_norm_sq: f64::NAN,
            ra_gap: f64::NAN,
        })
    }
}

/// Metric rows, one per recorded iterate, starting at `k = 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

pub const CSV_HEADER: [&str; 7] =
    ["k", "rel_err", "avg_cost", "disagreement", "dist_to_xbullet", "total_cost", "active_count"];

impl Trace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// First row whose `metric` is at most `eps`.
    pub fn first_hit(&self, metric: super::TargetMetric, eps: f64) -> Option<&TraceRow> {
        self.rows.iter().find(|r| metric.of(r) <= eps)
    }

    pub fn column(&self, metric: super::TargetMetric) -> Vec<f64> {
        self.rows.iter().map(|r| metric.of(r)).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.rel_err.to_string(),
                r.avg_cost.to_string(),
                r.disagreement.to_string(),
                r.dist_to_xbullet.to_string(),
                r.total_cost.to_string(),
                r.active_count.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::{derive_constants, ConstraintSet, CostModel, LipschitzRule, QuadraticCosts};

    fn inst() -> ProblemInstance {
        let centers = NodeStack::from_rows(&[vec![0.0], vec![2.0]]);
        let model = CostModel::QuadraticIdentity(QuadraticCosts::new(centers));
        derive_constants(model, ConstraintSet::ball(10.0), LipschitzRule::PerNodeMax).unwrap()
    }

    #[test]
    fn optimum_has_zero_relative_error() {
        // x⋆ = 1, f⋆ = 1
        let x = NodeStack::from_rows(&[vec![1.0], vec![1.0]]);
        let oracle = OracleValues { f_star: Some(1.0), x_bullet: Some(x.clone()) };
        let r = TraceRow::measure(0, &x, &inst(), &oracle, 0, 2).unwrap();
        assert_eq!((r.rel_err, r.disagreement, r.dist_to_xbullet), (0.0, 0.0, 0.0));
    }

    #[test]
    fn two_node_disagreement() {
        let x = NodeStack::from_rows(&[vec![0.0], vec![2.0]]);
        let r = TraceRow::measure(0, &x, &inst(), &OracleValues::default(), 0, 2).unwrap();
        assert!((r.disagreement - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.rel_err.is_nan() && r.dist_to_xbullet.is_nan());
    }

    #[test]
    fn nonpositive_optimum_is_rejected() {
        let x = NodeStack::from_rows(&[vec![0.0], vec![2.0]]);
        let oracle = OracleValues { f_star: Some(0.0), x_bullet: None };
        assert_eq!(
            TraceRow::measure(0, &x, &inst(), &oracle, 0, 2),
            Err(MetricError::NonPositiveOptimum(0.0))
        );
    }

    #[test]
    fn csv_has_header_and_rows() {
        let x = NodeStack::from_rows(&[vec![0.0], vec![2.0]]);
        let row = TraceRow::measure(3, &x, &inst(), &OracleValues::default(), 6, 2).unwrap();
        let t = Trace { rows: vec![row] };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert!(lines.next().unwrap().starts_with("3,NaN,"));
    }
}
