//! The penalty view `Ψ_α(x) = F(x) + (1/2α) xᵀ((I − C) ⊗ I)x` of the
//! iteration, its inexactness vector and the dense compact form.

use nalgebra::DMatrix;

use crate::costs::ProblemInstance;
use crate::graph::WeightMatrix;
use crate::schedule::ActivationVector;
use crate::stack::NodeStack;

/// `W_ij = C_ij z_i z_j` off the diagonal, `W_ii = 1 − Σ_{j≠i} W_ij`.
pub fn weight_realization(c: &WeightMatrix, z: &ActivationVector) -> DMatrix<f64> {
    let n = c.nodes();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut off = 0.0;
        for &(j, cij) in c.neighbor_weights(i) {
            if z.is_active(i) && z.is_active(j) {
                w[(i, j)] = cij;
                off += cij;
            }
        }
        w[(i, i)] = 1.0 - off;
    }
    w
}

/// `P(W x − (α/p_k)(∇F(x) ⊙ (z ⊗ 𝟏)))`, with `W` applied as a dense matrix.
pub fn compact_form_step(
    x: &NodeStack,
    inst: &ProblemInstance,
    c: &WeightMatrix,
    alpha: f64,
    z: &ActivationVector,
    p_k: f64,
) -> NodeStack {
    let w = weight_realization(c, z);
    let (n, d) = (x.nodes(), x.dim());
    let mut out = NodeStack::zeros(n, d);
    for i in 0..n {
        let row = out.row_mut(i);
        for j in 0..n {
            for (o, v) in row.iter_mut().zip(x.row(j)) {
                *o += w[(i, j)] * v;
            }
        }
        if z.is_active(i) {
            let g = inst.model.gradient(i, x.row(i));
            for (o, gv) in row.iter_mut().zip(&g) {
                *o -= alpha / p_k * gv;
            }
        }
        inst.project(row);
    }
    out
}

/// `Ψ_α(x)`.
pub fn penalty_value(x: &NodeStack, inst: &ProblemInstance, c: &WeightMatrix, alpha: f64) -> f64 {
    let mut quad = 0.0;
    for i in 0..x.nodes() {
        for &(j, cij) in c.neighbor_weights(i) {
            let d2: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            quad += cij * d2;
        }
    }
    // xᵀ(I − C)x = ½ Σ_i Σ_{j∈Ω_i} C_ij ‖x_i − x_j‖²
    inst.model.stacked_value(x) + quad / (4.0 * alpha)
}

/// `∇Ψ_α(x)_i = ∇f_i(x_i) + (1/α) Σ_{j∈Ω_i} C_ij (x_i − x_j)`.
pub fn penalty_gradient(x: &NodeStack, inst: &ProblemInstance, c: &WeightMatrix, alpha: f64) -> NodeStack {
    let mut g = inst.model.stacked_gradient(x);
    for i in 0..x.nodes() {
        for &(j, cij) in c.neighbor_weights(i) {
            let (xi, xj) = (x.row(i).to_vec(), x.row(j));
            for ((o, a), b) in g.row_mut(i).iter_mut().zip(&xi).zip(xj) {
                *o += cij * (a - b) / alpha;
            }
        }
    }
    g
}

/// `e_i = (z_i/p_k − 1)∇f_i(x_i) + (1/α) Σ_{j∈Ω_i} C_ij (z_i z_j − 1)(x_i − x_j)`.
pub fn error_vector(
    x: &NodeStack,
    inst: &ProblemInstance,
    c: &WeightMatrix,
    alpha: f64,
    z: &ActivationVector,
    p_k: f64,
) -> NodeStack {
    let mut e = inst.model.stacked_gradient(x);
    for i in 0..x.nodes() {
        let zi = if z.is_active(i) { 1.0 } else { 0.0 };
        let scale = zi / p_k - 1.0;
        e.row_mut(i).iter_mut().for_each(|v| *v *= scale);
        for &(j, cij) in c.neighbor_weights(i) {
            if z.is_active(i) && z.is_active(j) {
                continue;
            }
            let (xi, xj) = (x.row(i).to_vec(), x.row(j));
            for ((o, a), b) in e.row_mut(i).iter_mut().zip(&xi).zip(xj) {
                *o -= cij * (a - b) / alpha;
            }
        }
    }
    e
}

/// `P(x − α[∇Ψ_α(x) + e])`, with `e = 0` when omitted.
pub fn penalty_step(
    x: &NodeStack,
    inst: &ProblemInstance,
    c: &WeightMatrix,
    alpha: f64,
    e: Option<&NodeStack>,
) -> NodeStack {
    let g = penalty_gradient(x, inst, c, alpha);
    let mut out = x.clone();
    for i in 0..x.nodes() {
        let row = out.row_mut(i);
        for (o, gv) in row.iter_mut().zip(g.row(i)) {
            *o -= alpha * gv;
        }
        if let Some(e) = e {
            for (o, ev) in row.iter_mut().zip(e.row(i)) {
                *o -= alpha * ev;
            }
        }
        inst.project(row);
    }
    out
}
