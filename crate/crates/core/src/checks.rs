//! Invariant checks with pass/fail verdicts.
//!
//! [`simulation_checks`] audits a finished simulation and is embedded in
//! every report. [`quick_suite`] exercises the core identities on small
//! random instances and backs the `check` subcommand.

use rand::Rng;
use serde::Serialize;

use crate::costs::{derive_constants, ConstraintSet, CostModel, LipschitzRule, LogisticCosts, ProblemInstance, QuadraticCosts};
use crate::data::{parse_libsvm, partition, to_libsvm, NodeShards};
use crate::engine::{penalty_step, run, step_idling, step_standard, weight_realization, Algorithm, InitMode, OracleValues, RunConfig, RunState};
use crate::experiment::{preset, run_simulation, ExperimentConfig, SimulationResult, AlphaRule, FIXTURE_LIBSVM};
use crate::graph::{ensure_positive_definite, metropolis_weights, random_geometric_graph, sym_eigenvalues_desc, Network, Spectrum, WeightMatrix, DEFAULT_ATTEMPTS};
use crate::oracle::{quadratic_bounds, quadratic_mean_recursion, solve_centralized, solve_penalty, theory_bounds, QuadraticSetup, DEFAULT_BUDGET, DEFAULT_TOL};
use crate::rng::{stream, Purpose};
use crate::schedule::{draw_activations, ActivationSchedule, ActivationVector};
use crate::stack::NodeStack;
use crate::Result;

/// Relative slack on pathwise inequalities, absorbing rounding only.
pub const PATHWISE_SLACK: f64 = 1e-9;

/// Standard errors of slack on Monte-Carlo inequalities.
pub const MC_SE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Largest `lhs − rhs` over paired sequences, with the index where it occurs.
fn worst_excess(pairs: impl Iterator<Item = (f64, f64)>) -> (f64, usize) {
    pairs
        .enumerate()
        .map(|(k, (l, r))| (l - r, k))
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
}

/// Audits cost accounting, feasibility and every bound the run recorded.
pub fn simulation_checks(res: &SimulationResult) -> Vec<CheckResult> {
    let s = &res.setting;
    let b = &s.bounds;
    let n = s.net.nodes() as u64;
    let mut out = Vec::new();

    let radius_sq = s.penalty.x_bullet.distance(&NodeStack::replicate(s.net.nodes(), &s.centralized.x_star)).powi(2);
    out.push(CheckResult::new(
        "xbullet_neighbourhood",
        radius_sq <= b.neighbourhood_radius_sq(),
        format!("{radius_sq:.6e} <= {:.6e}", b.neighbourhood_radius_sq()),
    ));

    for a in &res.algorithms {
        let feasible = a.outcomes.iter().all(|o| o.x_final.rows().all(|r| s.inst.set.contains(r, 1e-9)));
        out.push(CheckResult::new(&format!("{}:feasible", a.label), feasible, "final rows lie in the set"));

        match a.algorithm {
            Algorithm::Standard => {
                let cost_ok = a.outcomes.iter().all(|o| o.trace.rows.iter().all(|r| r.total_cost == n * r.k));
                out.push(CheckResult::new(&format!("{}:cost_is_nk", a.label), cost_ok, "total_cost = N·k"));
                let (ex, k) = worst_excess(a.outcomes[0].trace.rows.iter().map(|r| {
                    let rhs = b.standard_rate(r.k);
                    (r.dist_to_xbullet, rhs * (1.0 + PATHWISE_SLACK))
                }));
                out.push(CheckResult::new(
                    &format!("{}:linear_rate", a.label),
                    ex <= 0.0,
                    format!("worst excess {ex:.3e} at k = {k}"),
                ));
            }
            Algorithm::Idling => {
                let ag = &a.aggregate;
                let (ex, k) = worst_excess((0..ag.len()).map(|k| (ag.disagreement_sq.mean[k], b.disagreement_bound + MC_SE * ag.disagreement_sq.se[k])));
                out.push(CheckResult::new(
                    &format!("{}:disagreement_bound", a.label),
                    ex <= 0.0,
                    format!("worst excess {ex:.3e} at k = {k}"),
                ));
                if res.config.record_error_norm {
                    let (ex, k) = worst_excess((0..ag.len().saturating_sub(1)).map(|k| {
                        let p = a.schedule.probability(k as u64);
                        (ag.error_norm_sq.mean[k], b.error_bound(p) + MC_SE * ag.error_norm_sq.se[k])
                    }));
                    out.push(CheckResult::new(
                        &format!("{}:error_bound", a.label),
                        ex <= 0.0,
                        format!("worst excess {ex:.3e} at k = {k}"),
                    ));
                }
                if let Some(eta) = b.eta {
                    let (ex, k) = worst_excess((1..ag.len()).map(|k| {
                        let rhs = b.mean_rate_const * k as f64 * eta.powf(k as f64);
                        (ag.dist_to_xbullet.mean[k], rhs + MC_SE * ag.dist_to_xbullet.se[k])
                    }));
                    out.push(CheckResult::new(
                        &format!("{}:mean_rate", a.label),
                        ex <= 0.0,
                        format!("worst excess {ex:.3e} at k = {}", k + 1),
                    ));
                }
                if res.config.record_error_norm {
                    let ok = a.outcomes.iter().all(|o| inexact_recursion_holds(&o.trace.rows, s.alpha, s.inst.mu));
                    out.push(CheckResult::new(&format!("{}:inexact_recursion", a.label), ok, "pathwise on every replica"));
                }
            }
            _ => {}
        }
    }
    out
}

/// `‖x^(k) − x^•‖ ≤ (1−αμ)^k‖x^(0) − x^•‖ + α Σ_{t=1}^k (1−αμ)^{k−t}‖e^(t−1)‖`.
pub fn inexact_recursion_holds(rows: &[crate::engine::TraceRow], alpha: f64, mu: f64) -> bool {
    let q = 1.0 - alpha * mu;
    let mut acc = rows[0].dist_to_xbullet;
    for k in 1..rows.len() {
        acc = q * acc + alpha * rows[k - 1].error_norm_sq.sqrt();
        let d = rows[k].dist_to_xbullet;
        if d > acc * (1.0 + PATHWISE_SLACK) + PATHWISE_SLACK {
            return false;
        }
    }
    true
}

/// A small random instance: random geometric graph, positive-definite
/// Metropolis weights, quadratic or logistic costs, ball or box set, and a
/// step size with `α ≤ λ_N(C)/L`.
pub fn random_small_instance<R: Rng + ?Sized>(rng: &mut R, max_nodes: usize, max_dim: usize) -> (Network, WeightMatrix, ProblemInstance, f64) {
    let n = rng.random_range(2..=max_nodes.max(2));
    let d = rng.random_range(1..=max_dim.max(1));
    let net = random_geometric_graph(n, 0.9, rng, DEFAULT_ATTEMPTS).expect("radius 0.9 connects small graphs");
    let c = ensure_positive_definite(&net, &metropolis_weights(&net), 0.1).expect("valid Metropolis input");
    let set = if rng.random_bool(0.5) {
        ConstraintSet::ball(rng.random_range(0.5..5.0))
    } else {
        let h = rng.random_range(0.5..3.0);
        ConstraintSet::cube(d, -h, h)
    };
    let model = if rng.random_bool(0.5) {
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        CostModel::QuadraticIdentity(QuadraticCosts::new(NodeStack::from_rows(&rows)))
    } else {
        let shards = (0..n)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let a: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
                        (a, if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                    })
                    .collect()
            })
            .collect();
        let reg = rng.random_range(0.1..1.0);
        CostModel::Logistic(LogisticCosts::from_shards(&NodeShards::new(shards, d - 1), reg).expect("consistent shards"))
    };
    let inst = derive_constants(model, set, LipschitzRule::PerNodeMax).expect("valid instance");
    let lambda_n = Spectrum::compute(&c, &net).expect("small eigenproblem").lambda_n_c;
    let alpha = rng.random_range(0.05..=1.0) * lambda_n / inst.lipschitz_l;
    (net, c, inst, alpha)
}

fn random_point<R: Rng + ?Sized>(inst: &ProblemInstance, rng: &mut R) -> NodeStack {
    InitMode::PerNodeUniform { half_width: 2.0 * inst.diameter_d }.draw(inst, rng)
}

/// One standard step against one projected gradient step on `Ψ_α`.
pub fn penalty_equivalence(instances: usize, seed: u64) -> CheckResult {
    let mut rng = stream(seed, 0, Purpose::Misc);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let (_, c, inst, alpha) = random_small_instance(&mut rng, 6, 3);
        let x = random_point(&inst, &mut rng);
        let mut st = RunState::new(x.clone());
        step_standard(&mut st, &inst, &c, alpha);
        worst = worst.max(st.x.max_abs_diff(&penalty_step(&x, &inst, &c, alpha, None)));
    }
    CheckResult::new("penalty_equivalence", worst < 1e-12, format!("max abs difference {worst:.3e} over {instances} instances"))
}

/// Per-step contraction on the two-node scalar instance equals `1 − α`.
pub fn exact_factor(alphas: &[Option<f64>], iterations: u64) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for a in alphas {
        let ExperimentConfig::Simulation(mut cfg) = preset("remark2")? else { unreachable!("remark2 is a simulation") };
        cfg.budget = iterations;
        cfg.alpha = match a {
            Some(v) => AlphaRule::Absolute { value: *v },
            None => AlphaRule::LambdaN,
        };
        let res = run_simulation(&cfg)?;
        let alpha = res.setting.alpha;
        let rows = &res.algorithms[0].outcomes[0].trace.rows;
        for w in rows.windows(2) {
            let ratio = w[1].dist_to_xbullet / w[0].dist_to_xbullet;
            worst = worst.max(((ratio - (1.0 - alpha)) / (1.0 - alpha)).abs());
        }
    }
    Ok(CheckResult::new("exact_factor", worst < 1e-12, format!("max relative deviation {worst:.3e}")))
}

/// Structure of `W^(k)`: symmetric, stochastic, spectrum in `(0, 1]`.
pub fn realization_structure(c: &WeightMatrix, p: f64, draws: usize, seed: u64) -> Result<CheckResult> {
    let n = c.nodes();
    let mut rng = stream(seed, 0, Purpose::Misc);
    let (mut asym, mut rowdev, mut lo, mut hi) = (0.0f64, 0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..draws {
        let z = draw_activations(p, n, k as u64, &mut rng);
        let w = weight_realization(c, &z);
        asym = asym.max((&w - w.transpose()).abs().max());
        for i in 0..n {
            rowdev = rowdev.max((w.row(i).sum() - 1.0).abs());
        }
        let eig = sym_eigenvalues_desc(&w)?;
        hi = hi.max(eig[0]);
        lo = lo.min(eig[n - 1]);
    }
    let ok = asym <= 1e-12 && rowdev <= 1e-12 && lo > 0.0 && hi <= 1.0 + 1e-12;
    Ok(CheckResult::new(
        "realization_structure",
        ok,
        format!("asym {asym:.1e}, row dev {rowdev:.1e}, eigenvalues in [{lo:.4}, {hi:.12}]"),
    ))
}

/// Idling under `p_k = 1` reproduces the standard iterates bit for bit.
pub fn always_on_identity(seed: u64) -> CheckResult {
    let mut rng = stream(seed, 1, Purpose::Misc);
    let (_, c, inst, alpha) = random_small_instance(&mut rng, 6, 3);
    let x = random_point(&inst, &mut rng);
    let (mut a, mut b) = (RunState::new(x.clone()), RunState::new(x));
    let all = ActivationVector::all(inst.nodes(), 0, true);
    let mut same = true;
    for _ in 0..100 {
        step_standard(&mut a, &inst, &c, alpha);
        step_idling(&mut b, &inst, &c, alpha, &all, 1.0);
        same &= a.x == b.x;
    }
    CheckResult::new("always_on_identity", same, "100 steps compared exactly")
}

/// `‖x^• − 𝟏⊗x⋆‖² ≤ αC_Ψ` on random small instances.
pub fn neighbourhood_random(instances: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = stream(seed, 2, Purpose::Misc);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..instances {
        let (net, c, inst, alpha) = random_small_instance(&mut rng, 6, 3);
        let sp = Spectrum::compute(&c, &net)?;
        let cs = solve_centralized(&inst, DEFAULT_TOL, DEFAULT_BUDGET)?;
        let start = NodeStack::replicate(inst.nodes(), &cs.x_star);
        let ps = solve_penalty(&inst, &c, alpha, DEFAULT_TOL, DEFAULT_BUDGET, start.clone())?;
        let b = theory_bounds(&inst, sp.lambda2_c, sp.lambda_n_c, alpha, &ActivationSchedule::AlwaysOn);
        worst = worst.max(ps.x_bullet.distance(&start).powi(2) / b.neighbourhood_radius_sq());
    }
    Ok(CheckResult::new("xbullet_neighbourhood_random", worst <= 1.0, format!("max ratio to bound {worst:.3e}")))
}

/// Exact mean recursion stays below its closed-form bound at odd `k ≥ 3`.
pub fn quadratic_mean_bound(seed: u64, horizon: u64) -> Result<CheckResult> {
    let mut rng = stream(seed, 3, Purpose::Misc);
    let net = random_geometric_graph(4, 0.8, &mut rng, DEFAULT_ATTEMPTS)?;
    let c0 = 1.0 / 8.0;
    let c = crate::graph::equal_weights(&net, c0)?;
    let lambda2_l = Spectrum::compute(&c, &net)?.laplacian_lambda2();
    let rows: Vec<Vec<f64>> = (0..4).map(|_| vec![rng.random_range(0.0..5.0)]).collect();
    let setup = QuadraticSetup {
        centers: NodeStack::from_rows(&rows),
        c0,
        lambda2_l,
        theta: 1.0 / (c0 * lambda2_l),
        alpha: 0.01,
        x0: NodeStack::zeros(4, 1),
    };
    let qb = quadratic_bounds(&setup)?;
    let rec = quadratic_mean_recursion(&setup, &c, &setup.schedule(), horizon);
    let ok = (3..=horizon).step_by(2).all(|k| rec.chi[k as usize] <= qb.chi_ub(k).expect("odd k >= 3") * (1.0 + PATHWISE_SLACK));
    Ok(CheckResult::new("quadratic_mean_bound", ok, format!("odd k in 3..={horizon}")))
}

/// The bundled LIBSVM sample survives a write/parse round trip and splits
/// evenly.
pub fn libsvm_round_trip() -> Result<CheckResult> {
    let ds = parse_libsvm(FIXTURE_LIBSVM.as_bytes(), None)?;
    let back = parse_libsvm(to_libsvm(&ds).as_bytes(), Some(ds.feature_dim))?;
    let shards = partition(&ds, 50)?;
    let ok = back == ds && shards.per_node() == ds.len() / 50;
    Ok(CheckResult::new("libsvm_round_trip", ok, format!("{} points, {} per node", ds.len(), shards.per_node())))
}

/// Fast versions of the core invariant suites.
pub fn quick_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = stream(seed, 4, Purpose::Misc);
    let net = random_geometric_graph(12, 0.5, &mut rng, DEFAULT_ATTEMPTS)?;
    let c = ensure_positive_definite(&net, &metropolis_weights(&net), 0.1)?;
    Ok(vec![
        penalty_equivalence(50, seed),
        exact_factor(&[Some(0.1), Some(0.5), None], 50)?,
        realization_structure(&c, 0.3, 500, seed)?,
        always_on_identity(seed),
        neighbourhood_random(20, seed)?,
        quadratic_mean_bound(seed, 501)?,
        libsvm_round_trip()?,
        idling_run_feasible(seed)?,
    ])
}

fn idling_run_feasible(seed: u64) -> Result<CheckResult> {
    let mut rng = stream(seed, 5, Purpose::Misc);
    let (net, c, inst, alpha) = random_small_instance(&mut rng, 6, 3);
    let mut cfg = RunConfig::new(Algorithm::Idling, alpha, ActivationSchedule::Geometric { delta: 0.9 }, 200);
    cfg.init = InitMode::PerNodeUniform { half_width: 10.0 };
    cfg.seed = seed;
    let out = run(&cfg, &inst, &net, &c, &OracleValues::default())?;
    let ok = out.x_final.rows().all(|r| inst.set.contains(r, 1e-9));
    Ok(CheckResult::new("idling_feasible", ok, "200 idling steps stay in the set"))
}
