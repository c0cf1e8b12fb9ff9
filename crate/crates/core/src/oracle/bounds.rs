use serde::{Deserialize, Serialize};

use crate::costs::ProblemInstance;
use crate::schedule::ActivationSchedule;

/// Exact summands in the `S_u` series before the tail bound takes over.
const S_U_TERMS: u64 = 100_000;

/// Closed-form constants for one `(instance, C, α, schedule)` choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub n: usize,
    pub alpha: f64,
    pub mu: f64,
    pub lipschitz_l: f64,
    pub grad_bound_g: f64,
    pub diameter_d: f64,
    pub lambda2_c: f64,
    pub lambda_n_c: f64,
    /// `α ≤ λ_N(C)/L`.
    pub step_size_ok: bool,
    pub p_min: f64,
    pub delta: Option<f64>,
    pub c_psi: f64,
    pub beta_sq: f64,
    /// `1 − β`, evaluated without cancellation.
    pub one_minus_beta: f64,
    pub c_e: f64,
    /// `max{1 − αμ, √δ}` for geometric schedules.
    pub eta: Option<f64>,
    /// `12·max{√N·D, α√N·G/(p_min(1−β))}`.
    pub mean_rate_const: f64,
    /// Bound on `E‖x̃^(k)‖²`.
    pub disagreement_bound: f64,
    pub g_psi_sq: f64,
    /// `Σ_k √(1 − p_k)`, infinite when divergent.
    pub s_u: f64,
}

/// Evaluates every constant from the instance, the spectrum of `C`, `α` and
/// the schedule.
pub fn theory_bounds(
    inst: &ProblemInstance,
    lambda2_c: f64,
    lambda_n_c: f64,
    alpha: f64,
    schedule: &ActivationSchedule,
) -> Bounds {
    let n = inst.nodes();
    let nf = n as f64;
    let (mu, g, d) = (inst.mu, inst.grad_bound_g, inst.diameter_d);
    let gap = 1.0 - lambda2_c;
    let c_psi = 4.0 * nf * (inst.f_upper - inst.f_lower) / gap + 2.0 * nf * g * g / (mu * gap);
    let p_min = schedule.p_min();
    // t = 1 − β², then 1 − β = t/(1 + β)
    let t = p_min.powi(n as i32) * (1.0 - lambda2_c * lambda2_c);
    let beta_sq = 1.0 - t;
    let one_minus_beta = t / (1.0 + (1.0 - t).max(0.0).sqrt());
    let c_e = 4.0 * nf * g * g / p_min + 72.0 * nf * g * g / (p_min * p_min * one_minus_beta.powi(2));
    let delta = schedule.delta();
    let eta = delta.map(|dl| (1.0 - alpha * mu).max(dl.sqrt()));
    let drift = alpha * nf.sqrt() * g / (p_min * one_minus_beta);
    Bounds {
        n,
        alpha,
        mu,
        lipschitz_l: inst.lipschitz_l,
        grad_bound_g: g,
        diameter_d: d,
        lambda2_c,
        lambda_n_c,
        step_size_ok: alpha <= lambda_n_c / inst.lipschitz_l,
        p_min,
        delta,
        c_psi,
        beta_sq,
        one_minus_beta,
        c_e,
        eta,
        mean_rate_const: 12.0 * (nf.sqrt() * d).max(drift),
        disagreement_bound: (3.0 * drift).powi(2),
        g_psi_sq: 2.0 * nf * g * g + 18.0 * nf * g * g / (p_min * one_minus_beta.powi(2)),
        s_u: schedule.sqrt_idle_sum(S_U_TERMS),
    }
}

impl Bounds {
    /// Radius of the `x^•` neighbourhood: `‖x^• − 𝟏 ⊗ x⋆‖² ≤ α·C_Ψ`.
    pub fn neighbourhood_radius_sq(&self) -> f64 {
        self.alpha * self.c_psi
    }

    /// `2√N·D(1 − αμ)^k`.
    pub fn standard_rate(&self, k: u64) -> f64 {
        2.0 * (self.n as f64).sqrt() * self.diameter_d * (1.0 - self.alpha * self.mu).powf(k as f64)
    }

    /// `mean_rate_const·k·η^k`, for geometric schedules.
    pub fn idling_rate(&self, k: u64) -> Option<f64> {
        self.eta.map(|eta| self.mean_rate_const * k as f64 * eta.powf(k as f64))
    }

    /// Bound on `E‖e^(k)‖²`: `C_e(1 − p_k²)`.
    pub fn error_bound(&self, p_k: f64) -> f64 {
        self.c_e * (1.0 - p_k * p_k)
    }

    /// The six summands bounding `E[f(x̄_ra^(k)) − f⋆]`.
    pub fn nondiff_terms(&self, k: u64) -> [f64; 6] {
        let (nf, kf) = (self.n as f64, k as f64);
        let (a, d, g) = (self.alpha, self.diameter_d, self.grad_bound_g);
        [
            4.0 * nf * d * d / (2.0 * a * kf),
            2.0 * 2f64.sqrt() * nf.sqrt() * d * self.c_e.sqrt() * self.s_u / kf,
            a * self.g_psi_sq,
            2.0 * a * self.c_e,
            a * nf * g * g / (2.0 * (1.0 - self.lambda2_c)),
            3.0 * a * nf * g * g / (self.p_min * self.one_minus_beta),
        ]
    }

    pub fn nondiff_rhs(&self, k: u64) -> f64 {
        self.nondiff_terms(k).iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::{derive_constants, ConstraintSet, CostModel, LipschitzRule, QuadraticCosts};
    use crate::stack::NodeStack;

    /// Two nodes with `G = 1`: centers zero, ball of radius 1.
    fn unit_g() -> ProblemInstance {
        let model = CostModel::QuadraticIdentity(QuadraticCosts::new(NodeStack::zeros(2, 1)));
        let inst = derive_constants(model, ConstraintSet::ball(1.0), LipschitzRule::PerNodeMax).unwrap();
        assert_eq!(inst.grad_bound_g, 1.0);
        inst
    }

    #[test]
    fn full_participation_beta_is_lambda2() {
        let b = theory_bounds(&unit_g(), 0.5, 0.2, 0.1, &ActivationSchedule::AlwaysOn);
        assert!((b.beta_sq - 0.25).abs() < 1e-15);
        assert!((b.one_minus_beta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn c_e_arithmetic() {
        let b = theory_bounds(&unit_g(), 0.5, 0.2, 0.1, &ActivationSchedule::AlwaysOn);
        assert!((b.c_e - 584.0).abs() < 1e-9);
    }

    #[test]
    fn eta_arithmetic() {
        let b = theory_bounds(&unit_g(), 0.5, 0.2, 0.1, &ActivationSchedule::Geometric { delta: 0.81 });
        assert!((b.eta.unwrap() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn one_minus_beta_survives_tiny_p_min() {
        let s = ActivationSchedule::Geometric { delta: 0.9 };
        let b = theory_bounds(&unit_g(), 0.5, 0.2, 0.1, &s);
        let t = 0.1f64.powi(2) * 0.75;
        let expect = t / (1.0 + (1.0 - t).sqrt());
        assert!((b.one_minus_beta - expect).abs() < 1e-12 * expect);
        assert!(b.one_minus_beta > 0.0);
    }

    #[test]
    fn everything_nonnegative() {
        let b = theory_bounds(&unit_g(), 0.7, 0.3, 0.05, &ActivationSchedule::Sublinear { cu: 0.5, zeta: 1.5 });
        for v in [b.c_psi, b.beta_sq, b.c_e, b.mean_rate_const, b.disagreement_bound, b.g_psi_sq, b.s_u] {
            assert!(v >= 0.0 && v.is_finite());
        }
        assert!(b.eta.is_none());
        assert!(b.nondiff_terms(10).iter().all(|t| *t >= 0.0));
    }
}
