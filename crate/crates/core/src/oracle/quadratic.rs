//! Identity-Hessian quadratic costs `f_i(x) = ½‖x − b_i‖²` with equal
//! weights `C = I − c0·𝓛`: closed-form error bounds and exact mean
//! recursions.

use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::graph::WeightMatrix;
use crate::schedule::ActivationSchedule;
use crate::stack::NodeStack;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSetup {
    /// Row `i` is `b_i`.
    pub centers: NodeStack,
    pub c0: f64,
    /// `λ_2(𝓛)`.
    pub lambda2_l: f64,
    pub theta: f64,
    pub alpha: f64,
    pub x0: NodeStack,
}

impl QuadraticSetup {
    /// `δ = 1 − αθ`.
    pub fn delta(&self) -> f64 {
        1.0 - self.alpha * self.theta
    }

    /// `b⋆ = 𝟏 ⊗ mean(b_i)`.
    pub fn b_star(&self) -> NodeStack {
        NodeStack::replicate(self.centers.nodes(), &self.centers.mean_row())
    }

    pub fn schedule(&self) -> ActivationSchedule {
        ActivationSchedule::HalfGeometric { delta: self.delta() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticBounds {
    pub n: usize,
    pub alpha: f64,
    pub c0: f64,
    pub lambda2_l: f64,
    pub theta: f64,
    pub delta: f64,
    /// `‖(I − J)b‖`.
    pub r_sp: f64,
    /// `‖x^(0) − b⋆‖`.
    pub r_0: f64,
    /// `1/(2αθ)`, per node.
    pub predicted_savings: f64,
}

pub fn quadratic_bounds(setup: &QuadraticSetup) -> Result<QuadraticBounds, OracleError> {
    let n = setup.centers.nodes();
    if n < 2 {
        return Err(OracleError::BadSetup(format!("need at least 2 nodes, got {n}")));
    }
    if setup.x0.nodes() != n || setup.x0.dim() != setup.centers.dim() {
        return Err(OracleError::BadSetup("x0 and centers differ in shape".into()));
    }
    let delta = setup.delta();
    if !(delta > 0.0 && delta < 1.0) {
        return Err(OracleError::BadDelta(delta));
    }
    Ok(QuadraticBounds {
        n,
        alpha: setup.alpha,
        c0: setup.c0,
        lambda2_l: setup.lambda2_l,
        theta: setup.theta,
        delta,
        r_sp: setup.centers.disagreement(),
        r_0: setup.x0.distance(&setup.b_star()),
        predicted_savings: 1.0 / (2.0 * setup.alpha * setup.theta),
    })
}

impl QuadraticBounds {
    fn gap(&self) -> f64 {
        self.c0 * self.lambda2_l
    }

    fn spread(&self) -> f64 {
        self.alpha * self.r_sp * (self.n as f64 - 1.0)
    }

    /// Bound on the standard method's `‖x^(k) − b⋆‖`.
    pub fn xi_ub(&self, k: u64) -> f64 {
        let (a, kf) = (self.alpha, k as f64);
        (1.0 - a).powf(kf) * self.r_0 + self.spread() * (1.0 - (1.0 - a - self.gap()).powf(kf)) / (self.gap() + a)
    }

    /// `lim_k ξ_ub(k) = αR_sp(N−1)/(c0λ_2 + α)`.
    pub fn xi_limit(&self) -> f64 {
        self.spread() / (self.gap() + self.alpha)
    }

    /// Bound on the idling method's `‖E[x^(k)] − b⋆‖`, defined for odd `k ≥ 3`.
    pub fn chi_ub(&self, k: u64) -> Option<f64> {
        if k < 3 || k % 2 == 0 {
            return None;
        }
        let (a, kf, g, dl) = (self.alpha, k as f64, self.gap(), self.delta);
        let head = 1.0 / (g * (1.0 - dl.powf(kf / 2.0)) + a);
        let tail = (1.0 - a - g * (1.0 - dl)).powf((kf - 1.0) / 2.0) / (g * (1.0 - dl) + a);
        Some((1.0 - a).powf(kf) * self.r_0 + self.spread() * (head + tail))
    }

    /// `K_ε = R_sp(N−1)/(c0λ_2 ε)·2 ln(2R_0/ε)`.
    pub fn k_epsilon(&self, eps: f64) -> f64 {
        self.r_sp * (self.n as f64 - 1.0) / (self.gap() * eps) * 2.0 * (2.0 * self.r_0 / eps).ln()
    }

    /// Accuracy `2α(N−1)R_sp/(c0λ_2)` targeted at step size `α`.
    pub fn epsilon_for_alpha(&self) -> f64 {
        2.0 * self.spread() / self.gap()
    }
}

/// Exact first moments `E[x^(k)]` and `χ(k) = ‖E[x^(k)] − b⋆‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanRecursion {
    pub means: Vec<NodeStack>,
    pub chi: Vec<f64>,
}

/// `E[x^(k+1)] = E[W^(k)] E[x^(k)] − α(E[x^(k)] − b)` with
/// `E[W_ij] = C_ij p_k²` off the diagonal. Unconstrained.
pub fn quadratic_mean_recursion(
    setup: &QuadraticSetup,
    c: &WeightMatrix,
    schedule: &ActivationSchedule,
    horizon: u64,
) -> MeanRecursion {
    let (n, d) = (setup.centers.nodes(), setup.centers.dim());
    let b_star = setup.b_star();
    let mut x = setup.x0.clone();
    let mut means = vec![x.clone()];
    let mut chi = vec![x.distance(&b_star)];
    for k in 0..horizon {
        let p2 = schedule.probability(k).powi(2);
        let mut next = NodeStack::zeros(n, d);
        for i in 0..n {
            let mut off = 0.0;
            let row = next.row_mut(i);
            for &(j, cij) in c.neighbor_weights(i) {
                let w = cij * p2;
                off += w;
                for (o, v) in row.iter_mut().zip(x.row(j)) {
                    *o += w * v;
                }
            }
            for ((o, v), b) in row.iter_mut().zip(x.row(i)).zip(setup.centers.row(i)) {
                *o += (1.0 - off) * v - setup.alpha * (v - b);
            }
        }
        x = next;
        chi.push(x.distance(&b_star));
        means.push(x.clone());
    }
    MeanRecursion { means, chi }
}
