//! Activation probabilities `p_k`, Bernoulli activation draws and the
//! link/gradient failure variables of the asynchronous model.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Default cap `δ̄` on the geometric ratio.
pub const DEFAULT_DELTA_CAP: f64 = 0.99999;

/// Smallest `p_0` the sublinear schedule is allowed to start from.
const SUBLINEAR_FLOOR: f64 = 0.01;

/// Rule for the per-iteration activation probability `p_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActivationSchedule {
    /// `p_k = 1`: the standard method.
    AlwaysOn,
    /// `p_k = 1 − δ^{k+1}`.
    Geometric { delta: f64 },
    /// `p_k = 1 − ½·δ^{k+1}`.
    HalfGeometric { delta: f64 },
    /// `p_k = max{1 − δ'^{k+1}, floor}` with `δ' = min{δ, cap}`.
    CappedGeometric { delta: f64, floor: f64, cap: f64 },
    /// `p_k = 1 − C_u/(k+1)^{1+ζ}`, clamped below at `max(1 − C_u, 0.01)`.
    Sublinear { cu: f64, zeta: f64 },
}

impl ActivationSchedule {
    /// `p_k`, always within `[p_min, 1]`.
    pub fn probability(&self, k: u64) -> f64 {
        let kp1 = (k + 1) as f64;
        let raw = match *self {
            Self::AlwaysOn => 1.0,
            Self::Geometric { delta } => 1.0 - delta.powf(kp1),
            Self::HalfGeometric { delta } => 1.0 - 0.5 * delta.powf(kp1),
            Self::CappedGeometric { delta, floor, cap } => (1.0 - delta.min(cap).powf(kp1)).max(floor),
            Self::Sublinear { cu, zeta } => 1.0 - cu / kp1.powf(1.0 + zeta),
        };
        raw.clamp(self.p_min(), 1.0)
    }

    /// Uniform lower bound `p_min > 0` on every `p_k`.
    pub fn p_min(&self) -> f64 {
        match *self {
            Self::AlwaysOn => 1.0,
            Self::Geometric { delta } => 1.0 - delta,
            Self::HalfGeometric { delta } => 1.0 - 0.5 * delta,
            Self::CappedGeometric { delta, floor, cap } => floor.max(1.0 - delta.min(cap)),
            Self::Sublinear { cu, .. } => (1.0 - cu).max(SUBLINEAR_FLOOR),
        }
    }

    /// `u_k = 1 − p_k`.
    pub fn idle_probability(&self, k: u64) -> f64 {
        1.0 - self.probability(k)
    }

    /// Geometric ratio where the schedule has one.
    pub fn delta(&self) -> Option<f64> {
        match *self {
            Self::Geometric { delta } | Self::HalfGeometric { delta } => Some(delta),
            Self::CappedGeometric { delta, cap, .. } => Some(delta.min(cap)),
            _ => None,
        }
    }

    /// Human readable form of the `p_k` rule, for reports.
    pub fn formula(&self) -> String {
        match *self {
            Self::AlwaysOn => "p_k = 1".into(),
            Self::Geometric { delta } => format!("p_k = 1 - {delta}^(k+1)"),
            Self::HalfGeometric { delta } => format!("p_k = 1 - 0.5*{delta}^(k+1)"),
            Self::CappedGeometric { delta, floor, cap } => {
                format!("p_k = max(1 - {}^(k+1), {floor})", delta.min(cap))
            }
            Self::Sublinear { cu, zeta } => {
                format!("p_k = max(1 - {cu}/(k+1)^(1+{zeta}), {})", self.p_min())
            }
        }
    }

    /// Expected activations per node over iterations `0..k`.
    pub fn expected_activations(&self, k: u64) -> f64 {
        (0..k).map(|t| self.probability(t)).sum()
    }

    /// Upper bound on `S_u = Σ_k √u_k`, infinite when the series diverges.
    ///
    /// The first `terms` summands are added exactly; the remainder is bounded
    /// by an integral.
    pub fn sqrt_idle_sum(&self, terms: u64) -> f64 {
        let mut terms = terms;
        if let Self::CappedGeometric { floor, .. } = *self {
            // the closed-form tail needs the floor to be inactive
            let delta = self.delta().expect("geometric");
            while 1.0 - delta.powf(terms as f64 + 1.0) < floor {
                terms += 1;
            }
        }
        let head: f64 = (0..terms).map(|k| self.idle_probability(k).max(0.0).sqrt()).sum();
        let tail = match *self {
            Self::AlwaysOn => 0.0,
            Self::Geometric { .. } | Self::HalfGeometric { .. } | Self::CappedGeometric { .. } => {
                let r = self.delta().expect("geometric").sqrt();
                let c = if matches!(self, Self::HalfGeometric { .. }) { 0.5f64.sqrt() } else { 1.0 };
                // Σ_{k ≥ terms} c·r^{k+1}
                c * r.powf(terms as f64 + 1.0) / (1.0 - r)
            }
            Self::Sublinear { cu, zeta } => {
                let s = (1.0 + zeta) / 2.0;
                if s <= 1.0 {
                    return f64::INFINITY;
                }
                // Σ_{k ≥ terms} (k+1)^{-s} ≤ ∫_{terms}^∞ x^{-s} dx
                cu.sqrt() * (terms.max(1) as f64).powf(1.0 - s) / (s - 1.0)
            }
        };
        head + tail
    }
}

/// `δ = min{(1 − αμ)², cap}`.
pub fn delta_from_alpha(alpha: f64, mu: f64, cap: f64) -> f64 {
    (1.0 - alpha * mu).powi(2).min(cap)
}

/// Realized activations `z^(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationVector {
    pub k: u64,
    pub bits: Vec<bool>,
}

impl ActivationVector {
    pub fn all(n: usize, k: u64, on: bool) -> Self {
        Self { k, bits: vec![on; n] }
    }

    pub fn from_bits(k: u64, bits: &[u8]) -> Self {
        Self { k, bits: bits.iter().map(|b| *b != 0).collect() }
    }

    pub fn active_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.bits[i]
    }
}

/// `n` independent Bernoulli(`p`) bits.
pub fn draw_activations<R: Rng + ?Sized>(p: f64, n: usize, k: u64, rng: &mut R) -> ActivationVector {
    let bits = (0..n).map(|_| bernoulli(p, rng)).collect();
    ActivationVector { k, bits }
}

fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    // p = 1 must always fire, p = 0 never
    rng.random::<f64>() < p
}

/// Success probabilities of links and of gradient evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsyncConfig {
    /// One probability per edge, in the network's edge order.
    pub link_up: Vec<f64>,
    /// One probability per node.
    pub grad_success: Vec<f64>,
}

impl AsyncConfig {
    pub fn uniform(edges: usize, nodes: usize, link_up: f64, grad_success: f64) -> Self {
        Self { link_up: vec![link_up; edges], grad_success: vec![grad_success; nodes] }
    }

    pub fn is_valid(&self) -> bool {
        self.link_up.iter().chain(&self.grad_success).all(|p| (0.0..=1.0).contains(p))
    }
}

/// Link bits (edge order) and gradient-success bits (node order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsyncBits {
    pub link_up: Vec<bool>,
    pub grad_ok: Vec<bool>,
}

impl AsyncBits {
    pub fn all_up(edges: usize, nodes: usize) -> Self {
        Self { link_up: vec![true; edges], grad_ok: vec![true; nodes] }
    }
}

pub fn draw_async<R: Rng + ?Sized>(cfg: &AsyncConfig, rng: &mut R) -> AsyncBits {
    AsyncBits {
        link_up: cfg.link_up.iter().map(|p| bernoulli(*p, rng)).collect(),
        grad_ok: cfg.grad_success.iter().map(|p| bernoulli(*p, rng)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn geometric_values() {
        let s = ActivationSchedule::Geometric { delta: 0.81 };
        assert!((s.probability(0) - 0.19).abs() < 1e-15);
        assert!((s.probability(1) - 0.3439).abs() < 1e-15);
        assert!((s.p_min() - 0.19).abs() < 1e-15);
    }

    #[test]
    fn capped_geometric_floor() {
        let s = ActivationSchedule::CappedGeometric { delta: 0.99, floor: 0.1, cap: DEFAULT_DELTA_CAP };
        assert_eq!(s.probability(0), 0.1);
        assert_eq!(s.p_min(), 0.1);
    }

    #[test]
    fn always_on() {
        let s = ActivationSchedule::AlwaysOn;
        assert!([0, 1, 10, 1_000_000].iter().all(|k| s.probability(*k) == 1.0));
    }

    #[test]
    fn delta_rule() {
        assert!((delta_from_alpha(0.1, 1.0, DEFAULT_DELTA_CAP) - 0.81).abs() < 1e-15);
        assert_eq!(delta_from_alpha(1e-7, 1.0, DEFAULT_DELTA_CAP), DEFAULT_DELTA_CAP);
        assert_eq!(delta_from_alpha(1.0, 1.0, DEFAULT_DELTA_CAP), 0.0);
    }

    #[test]
    fn sublinear_hypothesis_holds() {
        let s = ActivationSchedule::Sublinear { cu: 0.5, zeta: 1.5 };
        for k in 0..10_000u64 {
            let u = 1.0 - s.probability(k);
            assert!(u <= 0.5 / ((k + 1) as f64).powf(2.5) + 1e-16);
        }
        let big = ActivationSchedule::Sublinear { cu: 5.0, zeta: 0.2 };
        assert_eq!(big.probability(0), 0.01);
        assert!(1.0 - big.probability(0) <= 5.0);
    }

    #[test]
    fn sqrt_idle_sum_converges_for_fast_schedules() {
        let s = ActivationSchedule::Sublinear { cu: 0.5, zeta: 1.5 };
        let a = s.sqrt_idle_sum(1_000);
        let b = s.sqrt_idle_sum(100_000);
        assert!(a.is_finite() && b <= a + 1e-12 && a - b < 0.1 * a);
        assert!(ActivationSchedule::Sublinear { cu: 0.5, zeta: 0.5 }.sqrt_idle_sum(100).is_infinite());
        let g = ActivationSchedule::Geometric { delta: 0.81 };
        // √(0.81^{k+1}) = 0.9^{k+1}, summing to 9
        assert!((g.sqrt_idle_sum(10) - 9.0).abs() < 1e-12);
        assert_eq!(ActivationSchedule::AlwaysOn.sqrt_idle_sum(10), 0.0);
    }

    #[test]
    fn bernoulli_extremes() {
        let mut rng = stream(1, 0, Purpose::Activation);
        assert_eq!(draw_activations(1.0, 100, 0, &mut rng).active_count(), 100);
        assert_eq!(draw_activations(0.0, 100, 0, &mut rng).active_count(), 0);
    }

    #[test]
    fn bernoulli_half_mean() {
        let mut rng = stream(2, 0, Purpose::Activation);
        let n = 100_000;
        let on = draw_activations(0.5, n, 0, &mut rng).active_count() as f64;
        let se = (0.25 / n as f64).sqrt();
        assert!((on / n as f64 - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn async_draws() {
        let mut rng = stream(3, 0, Purpose::Async);
        let ones = draw_async(&AsyncConfig::uniform(4, 3, 1.0, 1.0), &mut rng);
        assert_eq!(ones, AsyncBits::all_up(4, 3));
        let zeros = draw_async(&AsyncConfig::uniform(4, 3, 0.0, 0.0), &mut rng);
        assert!(zeros.link_up.iter().chain(&zeros.grad_ok).all(|b| !b));

        let cfg = AsyncConfig::uniform(1, 1, 0.5, 1.0);
        let n = 100_000;
        let up = (0..n).filter(|_| draw_async(&cfg, &mut rng).link_up[0]).count() as f64;
        assert!((up / n as f64 - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }
}
