//! Reference solutions and closed-form theoretical quantities.

mod bounds;
mod quadratic;

pub use bounds::{theory_bounds, Bounds};
pub use quadratic::{quadratic_bounds, quadratic_mean_recursion, MeanRecursion, QuadraticBounds, QuadraticSetup};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::ProblemInstance;
use crate::engine::{step_standard, RunState};
use crate::graph::WeightMatrix;
use crate::stack::{norm, NodeStack};

/// Default successive-iterate tolerance of the fixed-point solvers.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default iteration budget of the fixed-point solvers.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{what} did not converge in {iterations} iterations (last step {last_step:e})")]
    BudgetExhausted { what: &'static str, iterations: u64, last_step: f64 },
    #[error("quadratic setup needs delta = 1 - alpha*theta in (0, 1), got {0}")]
    BadDelta(f64),
    #[error("quadratic setup: {0}")]
    BadSetup(String),
}

/// Minimizer of `f = Σ f_i` over `𝓧`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralizedSolution {
    pub x_star: Vec<f64>,
    pub f_star: f64,
    /// `‖x⋆ − P(x⋆ − ∇f(x⋆)/(NL))‖` at exit.
    pub residual: f64,
    pub iterations: u64,
}

/// Minimizer `x^•` of the penalty function over `𝓧^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySolution {
    pub x_bullet: NodeStack,
    /// Last successive-iterate distance divided by `α`.
    pub residual: f64,
    pub iterations: u64,
}

/// Stopping threshold: `tol`, raised to the rounding floor of `‖x‖`.
fn threshold(tol: f64, scale: f64) -> f64 {
    tol.max(64.0 * f64::EPSILON * scale.max(1.0))
}

/// Projected gradient on `f` with step `1/(NL)`, until the step is below `tol`.
pub fn solve_centralized(inst: &ProblemInstance, tol: f64, budget: u64) -> Result<CentralizedSolution, OracleError> {
    let n = inst.nodes() as f64;
    let step = 1.0 / (n * inst.lipschitz_l);
    let mut x = vec![0.0; inst.dim()];
    inst.project(&mut x);
    let mut last = f64::INFINITY;
    for it in 1..=budget {
        let g = inst.model.global_gradient(&x);
        let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
        inst.project(&mut y);
        last = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        x = y;
        if last < threshold(tol, norm(&x)) {
            let f_star = inst.model.global_value(&x);
            let g = inst.model.global_gradient(&x);
            let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            inst.project(&mut y);
            let residual = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            return Ok(CentralizedSolution { x_star: x, f_star, residual, iterations: it });
        }
    }
    Err(OracleError::BudgetExhausted { what: "centralized solver", iterations: budget, last_step: last })
}

/// Iterates the standard map from `start` until successive iterates are
/// within `tol·α`.
pub fn solve_penalty(
    inst: &ProblemInstance,
    c: &WeightMatrix,
    alpha: f64,
    tol: f64,
    budget: u64,
    start: NodeStack,
) -> Result<PenaltySolution, OracleError> {
    let mut state = RunState::new(start);
    let mut prev = state.x.clone();
    let mut last = f64::INFINITY;
    for it in 1..=budget {
        step_standard(&mut state, inst, c, alpha);
        last = state.x.distance(&prev);
        if last < alpha * threshold(tol, state.x.norm()) {
            return Ok(PenaltySolution { x_bullet: state.x, residual: last / alpha, iterations: it });
        }
        prev.as_mut_slice().copy_from_slice(state.x.as_slice());
    }
    Err(OracleError::BudgetExhausted { what: "penalty solver", iterations: budget, last_step: last })
}
