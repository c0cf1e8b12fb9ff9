//! Iteration rules over the stacked iterate `x ∈ 𝓧^N`.
//!
//! Every rule is built on one kernel: node `i` mixes with a subset of its
//! neighbours, puts the remaining mass on itself, subtracts a scaled local
//! gradient and projects. With every neighbour kept the self weight is
//! `C_ii` itself, which makes the idling rule under `p_k = 1`
//! bit-identical to the standard rule.

mod penalty;
mod run;
mod trace;

pub use penalty::{compact_form_step, error_vector, penalty_gradient, penalty_step, penalty_value, weight_realization};
pub use run::{run, Algorithm, InitMode, RunConfig, RunOutcome, StopReason, Target, TargetMetric};
pub use trace::{MetricError, OracleValues, Trace, TraceRow, CSV_HEADER};

use rand::Rng;

use crate::costs::ProblemInstance;
use crate::graph::{Network, WeightMatrix};
use crate::schedule::{ActivationVector, AsyncBits};
use crate::stack::NodeStack;

/// Iterate, counters and the running-average accumulator of one run.
#[derive(Debug, Clone)]
pub struct RunState {
    pub x: NodeStack,
    pub k: u64,
    /// Node activations so far.
    pub total_cost: u64,
    /// `Σ_{t<k} x^(t)`.
    pub running_sum: NodeStack,
    next: NodeStack,
    grad: Vec<f64>,
}

impl RunState {
    pub fn new(x0: NodeStack) -> Self {
        let (n, d) = (x0.nodes(), x0.dim());
        Self {
            running_sum: NodeStack::zeros(n, d),
            next: x0.clone(),
            grad: vec![0.0; d],
            x: x0,
            k: 0,
            total_cost: 0,
        }
    }

    /// `x_ra^(k) = (1/k) Σ_{t<k} x^(t)`, `None` at `k = 0`.
    pub fn running_average(&self) -> Option<NodeStack> {
        if self.k == 0 {
            return None;
        }
        let inv = 1.0 / self.k as f64;
        let data = self.running_sum.as_slice().iter().map(|v| v * inv).collect();
        Some(NodeStack::from_flat(self.x.nodes(), self.x.dim(), data))
    }

    fn begin_step(&mut self) {
        for (s, v) in self.running_sum.as_mut_slice().iter_mut().zip(self.x.as_slice()) {
            *s += v;
        }
        self.next.as_mut_slice().copy_from_slice(self.x.as_slice());
    }

    fn finish_step(&mut self, activations: u64) {
        std::mem::swap(&mut self.x, &mut self.next);
        self.k += 1;
        self.total_cost += activations;
    }
}

/// New row of an active node: `P(w_ii x_i + Σ_{kept j} C_ij x_j − step·∇f_i(x_i))`.
///
/// `step = 0` skips the gradient evaluation.
fn node_update(
    x: &NodeStack,
    inst: &ProblemInstance,
    c: &WeightMatrix,
    i: usize,
    step: f64,
    mut keep: impl FnMut(usize) -> bool,
    grad: &mut [f64],
    out: &mut [f64],
) {
    let xi = x.row(i);
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut kept_all = true;
    let mut kept_mass = 0.0;
    for &(j, w) in c.neighbor_weights(i) {
        if keep(j) {
            kept_mass += w;
            for (o, v) in out.iter_mut().zip(x.row(j)) {
                *o += w * v;
            }
        } else {
            kept_all = false;
        }
    }
    let self_w = if kept_all { c.self_weight(i) } else { 1.0 - kept_mass };
    for (o, v) in out.iter_mut().zip(xi) {
        *o += self_w * v;
    }
    if step != 0.0 {
        inst.model.gradient_into(i, xi, grad);
        for (o, g) in out.iter_mut().zip(grad.iter()) {
            *o -= step * g;
        }
    }
    inst.project(out);
}

/// `x ← P(Cx − α∇F(x))`; every node pays one activation.
pub fn step_standard(state: &mut RunState, inst: &ProblemInstance, c: &WeightMatrix, alpha: f64) {
    state.begin_step();
    let n = state.x.nodes();
    for i in 0..n {
        node_update(&state.x, inst, c, i, alpha, |_| true, &mut state.grad, state.next.row_mut(i));
    }
    state.finish_step(n as u64);
}

/// Idling update: active nodes mix with active neighbours and take a
/// gradient step of size `α/p_k`; idle rows are carried over untouched.
pub fn step_idling(
    state: &mut RunState,
    inst: &ProblemInstance,
    c: &WeightMatrix,
    alpha: f64,
    z: &ActivationVector,
    p_k: f64,
) {
    state.begin_step();
    let step = alpha / p_k;
    let mut active = 0;
    for i in 0..state.x.nodes() {
        if !z.is_active(i) {
            continue;
        }
        active += 1;
        node_update(&state.x, inst, c, i, step, |j| z.is_active(j), &mut state.grad, state.next.row_mut(i));
    }
    state.finish_step(active);
}

/// Idling update under link and gradient failures. A neighbour counts only
/// when it is active and the link is up; a failed gradient drops the
/// gradient term. Cost counts activations, not successes.
#[allow(clippy::too_many_arguments)]
pub fn step_async(
    state: &mut RunState,
    inst: &ProblemInstance,
    net: &Network,
    c: &WeightMatrix,
    alpha: f64,
    z: &ActivationVector,
    bits: &AsyncBits,
    p_k: f64,
) {
    state.begin_step();
    let edges = net.edges();
    let mut active = 0;
    for i in 0..state.x.nodes() {
        if !z.is_active(i) {
            continue;
        }
        active += 1;
        let step = if bits.grad_ok[i] { alpha / p_k } else { 0.0 };
        let link = |j: usize| {
            let e = (i.min(j), i.max(j));
            let idx = edges.binary_search(&e).expect("neighbour pair is an edge");
            z.is_active(j) && bits.link_up[idx]
        };
        node_update(&state.x, inst, c, i, step, link, &mut state.grad, state.next.row_mut(i));
    }
    state.finish_step(active);
}

/// One gossip round: a uniformly drawn edge `{i, j}` averages and both
/// endpoints step along their own gradient. Returns the edge.
pub fn step_gossip<R: Rng + ?Sized>(
    state: &mut RunState,
    inst: &ProblemInstance,
    net: &Network,
    alpha: f64,
    rng: &mut R,
) -> (usize, usize) {
    let edges = net.edges();
    assert!(!edges.is_empty(), "gossip needs at least one edge");
    let (i, j) = edges[rng.random_range(0..edges.len())];
    state.begin_step();
    let avg: Vec<f64> = state.x.row(i).iter().zip(state.x.row(j)).map(|(a, b)| 0.5 * (a + b)).collect();
    for node in [i, j] {
        inst.model.gradient_into(node, state.x.row(node), &mut state.grad);
        let out = state.next.row_mut(node);
        for ((o, a), g) in out.iter_mut().zip(&avg).zip(&state.grad) {
            *o = a - alpha * g;
        }
        inst.project(out);
    }
    state.finish_step(2);
    (i, j)
}
