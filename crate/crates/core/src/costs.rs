//! Local cost models, constraint sets and the problem constants derived
//! from them (μ, L, G, D, M_f, m_f).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::NodeShards;
use crate::graph::sym_eigenvalues_desc;
use crate::stack::{dot, norm, NodeStack};

/// Beyond this magnitude the logistic loss switches to its asymptotic forms.
const EXP_GUARD: f64 = 30.0;

#[derive(Debug, Error)]
pub enum CostError {
    #[error("computed Lipschitz constant {l} is below the strong convexity modulus {mu}")]
    LipschitzBelowModulus { l: f64, mu: f64 },
    #[error("regularizer must be positive, got {0}")]
    BadRegularizer(f64),
    #[error("invalid constraint set: {0}")]
    BadSet(String),
    #[error("dimension mismatch: model has d = {model}, set has d = {set}")]
    DimensionMismatch { model: usize, set: usize },
    #[error("eigenvalue computation failed")]
    Eigen,
}

/// Closed, convex, bounded feasible set `𝓧`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSet {
    Ball { radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl ConstraintSet {
    pub fn ball(radius: f64) -> Self {
        Self::Ball { radius }
    }

    /// The same interval `[lo, hi]` on each of `d` coordinates.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Self {
        Self::Box { lo: vec![lo; d], hi: vec![hi; d] }
    }

    pub fn validate(&self) -> Result<(), CostError> {
        match self {
            Self::Ball { radius } if !(radius.is_finite() && *radius > 0.0) => {
                Err(CostError::BadSet(format!("ball radius {radius}")))
            }
            Self::Box { lo, hi } if lo.len() != hi.len() || lo.is_empty() => {
                Err(CostError::BadSet("box bounds of different length".into()))
            }
            Self::Box { lo, hi } if lo.iter().zip(hi).any(|(l, h)| !(l <= h) || !l.is_finite() || !h.is_finite()) => {
                Err(CostError::BadSet("box with lo > hi or infinite bound".into()))
            }
            _ => Ok(()),
        }
    }

    /// Box dimension, if fixed by the set.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Ball { .. } => None,
            Self::Box { lo, .. } => Some(lo.len()),
        }
    }

    /// `D = max{‖x‖ : x ∈ 𝓧}`.
    pub fn diameter(&self) -> f64 {
        match self {
            Self::Ball { radius } => *radius,
            Self::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| l.abs().max(h.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Euclidean projection, in place.
    pub fn project(&self, y: &mut [f64]) {
        match self {
            Self::Ball { radius } => {
                let n = norm(y);
                if n > *radius {
                    let s = radius / n;
                    y.iter_mut().for_each(|v| *v *= s);
                }
            }
            Self::Box { lo, hi } => {
                for ((v, l), h) in y.iter_mut().zip(lo).zip(hi) {
                    *v = v.clamp(*l, *h);
                }
            }
        }
    }

    pub fn projected(&self, y: &[f64]) -> Vec<f64> {
        let mut v = y.to_vec();
        self.project(&mut v);
        v
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            Self::Ball { radius } => norm(x) <= radius + tol,
            Self::Box { lo, hi } => x.iter().zip(lo).zip(hi).all(|((v, l), h)| *v >= l - tol && *v <= h + tol),
        }
    }
}

/// `f_i(x) = Σ_j log(1 + exp(−c_ijᵀx)) + (R/2)‖x‖²`, with
/// `c_ij = (b_ij·a_ij, b_ij)` so that `c_ijᵀx = b_ij·(x₁ᵀa_ij + x₀)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticCosts {
    dim: usize,
    reg: f64,
    /// Per node, the `c_ij` vectors concatenated (length `J·d`).
    samples: Vec<Vec<f64>>,
}

impl LogisticCosts {
    pub fn from_shards(shards: &NodeShards, reg: f64) -> Result<Self, CostError> {
        if !(reg > 0.0) {
            return Err(CostError::BadRegularizer(reg));
        }
        let dim = shards.dim();
        let samples = shards
            .shards()
            .iter()
            .map(|shard| {
                let mut flat = Vec::with_capacity(shard.len() * dim);
                for (a, b) in shard {
                    flat.extend(a.iter().map(|v| b * v));
                    flat.push(*b);
                }
                flat
            })
            .collect();
        Ok(Self { dim, reg, samples })
    }

    /// Nodes with only the regularizer (no data).
    pub fn regularizer_only(nodes: usize, dim: usize, reg: f64) -> Result<Self, CostError> {
        if !(reg > 0.0) {
            return Err(CostError::BadRegularizer(reg));
        }
        Ok(Self { dim, reg, samples: vec![Vec::new(); nodes] })
    }

    pub fn regularizer(&self) -> f64 {
        self.reg
    }

    pub fn node_samples(&self, node: usize) -> impl Iterator<Item = &[f64]> {
        self.samples[node].chunks_exact(self.dim)
    }

    /// `‖Σ_j c_ij c_ijᵀ‖` for one node, or summed over all nodes.
    fn scatter_norm(&self, node: Option<usize>) -> Result<f64, CostError> {
        let rows: Vec<&[f64]> = match node {
            Some(i) => self.node_samples(i).collect(),
            None => (0..self.samples.len()).flat_map(|i| self.node_samples(i)).collect(),
        };
        if rows.is_empty() {
            return Ok(0.0);
        }
        // Same nonzero spectrum as the d×d scatter; the smaller side is cheaper.
        let c = DMatrix::from_fn(rows.len(), self.dim, |r, s| rows[r][s]);
        let m = if rows.len() < self.dim { &c * c.transpose() } else { c.transpose() * &c };
        Ok(sym_eigenvalues_desc(&m).map_err(|_| CostError::Eigen)?[0].max(0.0))
    }
}

/// `f_i(x) = ½‖x − b_i‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCosts {
    centers: NodeStack,
}

impl QuadraticCosts {
    pub fn new(centers: NodeStack) -> Self {
        Self { centers }
    }

    pub fn centers(&self) -> &NodeStack {
        &self.centers
    }
}

/// Per-node cost functions `f_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostModel {
    Logistic(LogisticCosts),
    QuadraticIdentity(QuadraticCosts),
}

/// `log(1 + e^{−t})` without overflow.
pub fn logistic_loss(t: f64) -> f64 {
    if t > EXP_GUARD {
        (-t).exp()
    } else if t < -EXP_GUARD {
        -t + t.exp()
    } else {
        (-t).exp().ln_1p()
    }
}

/// `σ(−t) = 1/(1 + e^{t})` without overflow.
pub fn sigmoid_neg(t: f64) -> f64 {
    if t >= 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

impl CostModel {
    pub fn nodes(&self) -> usize {
        match self {
            Self::Logistic(m) => m.samples.len(),
            Self::QuadraticIdentity(m) => m.centers.nodes(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Logistic(m) => m.dim,
            Self::QuadraticIdentity(m) => m.centers.dim(),
        }
    }

    pub fn value(&self, node: usize, x: &[f64]) -> f64 {
        match self {
            Self::Logistic(m) => {
                let loss: f64 = m.node_samples(node).map(|c| logistic_loss(dot(c, x))).sum();
                loss + 0.5 * m.reg * dot(x, x)
            }
            Self::QuadraticIdentity(m) => {
                0.5 * m.centers.row(node).iter().zip(x).map(|(b, v)| (v - b) * (v - b)).sum::<f64>()
            }
        }
    }

    /// Writes `∇f_i(x)` into `out`.
    pub fn gradient_into(&self, node: usize, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Logistic(m) => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = m.reg * v;
                }
                for c in m.node_samples(node) {
                    let s = sigmoid_neg(dot(c, x));
                    for (o, cv) in out.iter_mut().zip(c) {
                        *o -= s * cv;
                    }
                }
            }
            Self::QuadraticIdentity(m) => {
                for ((o, v), b) in out.iter_mut().zip(x).zip(m.centers.row(node)) {
                    *o = v - b;
                }
            }
        }
    }

    pub fn gradient(&self, node: usize, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        self.gradient_into(node, x, &mut g);
        g
    }

    pub fn evaluate(&self, node: usize, x: &[f64]) -> (f64, Vec<f64>) {
        (self.value(node, x), self.gradient(node, x))
    }

    /// Network objective `f(x) = Σ_i f_i(x)`.
    pub fn global_value(&self, x: &[f64]) -> f64 {
        (0..self.nodes()).map(|i| self.value(i, x)).sum()
    }

    pub fn global_gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        let mut gi = vec![0.0; x.len()];
        for i in 0..self.nodes() {
            self.gradient_into(i, x, &mut gi);
            g.iter_mut().zip(&gi).for_each(|(a, b)| *a += b);
        }
        g
    }

    /// `F(x) = Σ_i f_i(x_i)` for stacked `x`.
    pub fn stacked_value(&self, x: &NodeStack) -> f64 {
        (0..self.nodes()).map(|i| self.value(i, x.row(i))).sum()
    }

    /// `∇F(x)`, row `i` holding `∇f_i(x_i)`.
    pub fn stacked_gradient(&self, x: &NodeStack) -> NodeStack {
        let mut g = NodeStack::zeros(x.nodes(), x.dim());
        for i in 0..self.nodes() {
            self.gradient_into(i, x.row(i), g.row_mut(i));
        }
        g
    }
}

/// Which Lipschitz formula to use for logistic costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzRule {
    /// `(1/4)·max_i ‖Σ_j c_ij c_ijᵀ‖ + R`, a valid bound for every `f_i`.
    #[default]
    PerNodeMax,
    /// `(1/(4N))·‖Σ_ij c_ij c_ijᵀ‖ + R`, the Lipschitz constant of `f/N`.
    NetworkAverage,
}

/// Costs, feasible set and every derived constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub model: CostModel,
    pub set: ConstraintSet,
    pub mu: f64,
    pub lipschitz_l: f64,
    pub grad_bound_g: f64,
    pub diameter_d: f64,
    pub f_upper: f64,
    pub f_lower: f64,
}

impl ProblemInstance {
    pub fn nodes(&self) -> usize {
        self.model.nodes()
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn project(&self, y: &mut [f64]) {
        self.set.project(y);
    }
}

/// Computes `μ`, `L`, `G = L·D + max‖∇f_i(0)‖` and
/// `M_f = −m_f = G·D + max|f_i(0)|`.
pub fn derive_constants(model: CostModel, set: ConstraintSet, rule: LipschitzRule) -> Result<ProblemInstance, CostError> {
    set.validate()?;
    if let Some(d) = set.dim() {
        if d != model.dim() {
            return Err(CostError::DimensionMismatch { model: model.dim(), set: d });
        }
    }
    let (mu, l) = match &model {
        CostModel::Logistic(m) => {
            let n = m.samples.len();
            let scatter = match rule {
                LipschitzRule::PerNodeMax => (0..n)
                    .map(|i| m.scatter_norm(Some(i)))
                    .collect::<Result<Vec<_>, _>>()?
                    .into_iter()
                    .fold(0.0, f64::max),
                LipschitzRule::NetworkAverage => m.scatter_norm(None)? / n as f64,
            };
            (m.reg, 0.25 * scatter + m.reg)
        }
        CostModel::QuadraticIdentity(_) => (1.0, 1.0),
    };
    if l < mu {
        return Err(CostError::LipschitzBelowModulus { l, mu });
    }
    let d = set.diameter();
    let zero = vec![0.0; model.dim()];
    let n = model.nodes();
    let g0 = (0..n).map(|i| norm(&model.gradient(i, &zero))).fold(0.0, f64::max);
    let f0 = (0..n).map(|i| model.value(i, &zero).abs()).fold(0.0, f64::max);
    let g = l * d + g0;
    let mf = g * d + f0;
    Ok(ProblemInstance {
        model,
        set,
        mu,
        lipschitz_l: l,
        grad_bound_g: g,
        diameter_d: d,
        f_upper: mf,
        f_lower: -mf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(centers: &[Vec<f64>]) -> CostModel {
        CostModel::QuadraticIdentity(QuadraticCosts::new(NodeStack::from_rows(centers)))
    }

    #[test]
    fn quadratic_minimum_is_zero() {
        let m = quad(&[vec![0.0, 0.0], vec![1.0, -2.0]]);
        let (v, g) = m.evaluate(0, &[0.0, 0.0]);
        assert_eq!((v, g), (0.0, vec![0.0, 0.0]));
        let (v, g) = m.evaluate(1, &[1.0, -2.0]);
        assert_eq!((v, g), (0.0, vec![0.0, 0.0]));
    }

    #[test]
    fn logistic_single_sample_at_origin() {
        let c = vec![0.5, -1.0, 2.0];
        let m = CostModel::Logistic(LogisticCosts { dim: 3, reg: 0.3, samples: vec![c.clone()] });
        let (v, g) = m.evaluate(0, &[0.0; 3]);
        assert!((v - 2f64.ln()).abs() < 1e-15);
        for (gi, ci) in g.iter().zip(&c) {
            assert!((gi + ci / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn logistic_is_stable_far_out() {
        assert!(logistic_loss(1e4).is_finite() && logistic_loss(-1e4).is_finite());
        assert!((logistic_loss(-1e4) - 1e4).abs() < 1e-9);
        assert!((logistic_loss(40.0) - (-40f64).exp()).abs() < 1e-30);
        assert_eq!(sigmoid_neg(-1e4), 1.0);
        assert_eq!(sigmoid_neg(1e4), 0.0);
        // continuity across the guard
        assert!((logistic_loss(30.0 - 1e-12) - logistic_loss(30.0 + 1e-12)).abs() < 1e-20);
        assert!((logistic_loss(-30.0 - 1e-12) - logistic_loss(-30.0 + 1e-12)).abs() < 1e-10);
    }

    #[test]
    fn projections() {
        let ball = ConstraintSet::ball(1.0);
        let p = ball.projected(&[3.0, 4.0]);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        assert_eq!(ball.projected(&[0.3, 0.4]), vec![0.3, 0.4]);
        let bx = ConstraintSet::cube(1, -2.0, 2.0);
        assert_eq!(bx.projected(&[3.0]), vec![2.0]);
        assert_eq!(bx.diameter(), 2.0);
        assert_eq!(ConstraintSet::cube(2, -3.0, 4.0).diameter(), 32f64.sqrt());
    }

    #[test]
    fn quadratic_constants() {
        let m = quad(&[vec![3.0, 4.0], vec![1.0, 0.0]]);
        let p = derive_constants(m, ConstraintSet::ball(2.0), LipschitzRule::default()).unwrap();
        assert_eq!((p.mu, p.lipschitz_l), (1.0, 1.0));
        assert!((p.grad_bound_g - (2.0 + 5.0)).abs() < 1e-15);
        // max |f_i(0)| = 12.5
        assert!((p.f_upper - (7.0 * 2.0 + 12.5)).abs() < 1e-12);
        assert_eq!(p.f_lower, -p.f_upper);
    }

    #[test]
    fn regularizer_only_logistic() {
        let m = CostModel::Logistic(LogisticCosts::regularizer_only(3, 2, 0.7).unwrap());
        let p = derive_constants(m, ConstraintSet::ball(1.0), LipschitzRule::PerNodeMax).unwrap();
        assert_eq!((p.mu, p.lipschitz_l), (0.7, 0.7));
    }

    #[test]
    fn bad_inputs() {
        assert!(LogisticCosts::regularizer_only(2, 2, 0.0).is_err());
        let m = quad(&[vec![1.0], vec![2.0]]);
        assert!(matches!(
            derive_constants(m.clone(), ConstraintSet::cube(2, -1.0, 1.0), LipschitzRule::default()),
            Err(CostError::DimensionMismatch { .. })
        ));
        assert!(derive_constants(m, ConstraintSet::ball(-1.0), LipschitzRule::default()).is_err());
    }
}
