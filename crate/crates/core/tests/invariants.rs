use proptest::prelude::*;
use rand::Rng;

use idlegrad::checks::random_small_instance;
use idlegrad::data::{parse_libsvm, partition, to_libsvm, Dataset};
use idlegrad::engine::{compact_form_step, error_vector, penalty_gradient, penalty_step, penalty_value, step_idling};
use idlegrad::graph::random_geometric_graph;
use idlegrad::prelude::*;
use idlegrad::stack::{dot, norm};

type Instance = (Network, WeightMatrix, ProblemInstance, f64);

fn instance(seed: u64) -> (Instance, rand_chacha::ChaCha8Rng) {
    let mut rng = stream(seed, 0, Purpose::Misc);
    (random_small_instance(&mut rng, 6, 3), rng)
}

fn point<R: Rng>(d: usize, scale: f64, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-scale..scale)).collect()
}

/// A feasible stacked point; iterates never leave `𝓧^N`.
fn stack<R: Rng>(inst: &ProblemInstance, scale: f64, rng: &mut R) -> NodeStack {
    let rows: Vec<Vec<f64>> = (0..inst.nodes()).map(|_| inst.set.projected(&point(inst.dim(), scale, rng))).collect();
    NodeStack::from_rows(&rows)
}

fn activations<R: Rng>(n: usize, rng: &mut R) -> ActivationVector {
    let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
    ActivationVector::from_bits(0, &bits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_matches_central_difference(seed in any::<u64>()) {
        let ((_, _, inst, _), mut rng) = instance(seed);
        let i = rng.random_range(0..inst.nodes());
        let x = point(inst.dim(), 3.0, &mut rng);
        let mut u = point(inst.dim(), 1.0, &mut rng);
        let un = norm(&u).max(1e-12);
        u.iter_mut().for_each(|v| *v /= un);
        let h = 1e-6;
        let shift = |s: f64| -> Vec<f64> { x.iter().zip(&u).map(|(a, b)| a + s * b).collect() };
        let fd = (inst.model.value(i, &shift(h)) - inst.model.value(i, &shift(-h))) / (2.0 * h);
        let exact = dot(&inst.model.gradient(i, &x), &u);
        prop_assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "fd {fd} vs {exact}");
    }

    #[test]
    fn gradient_is_strongly_monotone_and_lipschitz(seed in any::<u64>()) {
        let ((_, _, inst, _), mut rng) = instance(seed);
        let i = rng.random_range(0..inst.nodes());
        let (x, y) = (point(inst.dim(), 5.0, &mut rng), point(inst.dim(), 5.0, &mut rng));
        let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let dg: Vec<f64> = inst.model.gradient(i, &x).iter().zip(inst.model.gradient(i, &y)).map(|(a, b)| a - b).collect();
        let d2 = dot(&dx, &dx);
        prop_assert!(dot(&dg, &dx) >= inst.mu * d2 * (1.0 - 1e-9) - 1e-12);
        prop_assert!(norm(&dg) <= inst.lipschitz_l * d2.sqrt() * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn projection_is_idempotent_and_nonexpansive(seed in any::<u64>()) {
        let ((_, _, inst, _), mut rng) = instance(seed);
        let (x, y) = (point(inst.dim(), 10.0, &mut rng), point(inst.dim(), 10.0, &mut rng));
        let (px, py) = (inst.set.projected(&x), inst.set.projected(&y));
        prop_assert!(inst.set.contains(&px, 1e-12));
        let dist = |a: &[f64], b: &[f64]| norm(&a.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
        prop_assert!(dist(&inst.set.projected(&px), &px) <= 1e-12 * inst.diameter_d.max(1.0));
        prop_assert!(dist(&px, &py) <= dist(&x, &y) * (1.0 + 1e-12));
    }

    #[test]
    fn weights_are_symmetric_stochastic_positive_definite(seed in any::<u64>()) {
        let ((net, c, _, _), _) = instance(seed);
        let w = c.dense();
        prop_assert!((w - w.transpose()).abs().max() < 1e-14);
        for i in 0..net.nodes() {
            prop_assert!((w.row(i).sum() - 1.0).abs() < 1e-12);
        }
        let sp = Spectrum::compute(&c, &net).unwrap();
        prop_assert!(sp.lambda_n_c > 0.0 && sp.lambda2_c < 1.0);
    }

    #[test]
    fn idling_step_matches_compact_form(seed in any::<u64>(), p in 0.05f64..=1.0) {
        let ((_, c, inst, alpha), mut rng) = instance(seed);
        let x = stack(&inst, 4.0, &mut rng);
        let z = activations(inst.nodes(), &mut rng);
        let mut st = RunState::new(x.clone());
        step_idling(&mut st, &inst, &c, alpha, &z, p);
        prop_assert!(st.x.max_abs_diff(&compact_form_step(&x, &inst, &c, alpha, &z, p)) < 1e-12);
    }

    #[test]
    fn idling_step_is_inexact_penalty_step(seed in any::<u64>(), p in 0.05f64..=1.0) {
        let ((_, c, inst, alpha), mut rng) = instance(seed);
        let x = stack(&inst, 4.0, &mut rng);
        let z = activations(inst.nodes(), &mut rng);
        let e = error_vector(&x, &inst, &c, alpha, &z, p);
        let mut st = RunState::new(x.clone());
        step_idling(&mut st, &inst, &c, alpha, &z, p);
        let scale = x.norm().max(1.0);
        prop_assert!(st.x.max_abs_diff(&penalty_step(&x, &inst, &c, alpha, Some(&e))) < 1e-11 * scale);
    }

    #[test]
    fn penalty_gradient_matches_central_difference(seed in any::<u64>()) {
        let ((_, c, inst, alpha), mut rng) = instance(seed);
        let x = stack(&inst, 2.0, &mut rng);
        let u = stack(&inst, 1.0, &mut rng);
        let h = 1e-6;
        let shift = |s: f64| {
            let data = x.as_slice().iter().zip(u.as_slice()).map(|(a, b)| a + s * b).collect();
            NodeStack::from_flat(inst.nodes(), inst.dim(), data)
        };
        let fd = (penalty_value(&shift(h), &inst, &c, alpha) - penalty_value(&shift(-h), &inst, &c, alpha)) / (2.0 * h);
        let exact = dot(penalty_gradient(&x, &inst, &c, alpha).as_slice(), u.as_slice());
        prop_assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "fd {fd} vs {exact}");
    }

    #[test]
    fn libsvm_round_trip(rows in prop::collection::vec((prop::bool::ANY, prop::collection::vec(-1e6f64..1e6, 5)), 1..20)) {
        let ds = Dataset {
            features: rows.iter().map(|(_, f)| f.clone()).collect(),
            labels: rows.iter().map(|(l, _)| if *l { 1.0 } else { -1.0 }).collect(),
            feature_dim: 5,
        };
        prop_assert_eq!(parse_libsvm(to_libsvm(&ds).as_bytes(), Some(5)).unwrap(), ds);
    }

    #[test]
    fn partition_drops_only_the_remainder(len in 1usize..400, nodes in 1usize..60) {
        let ds = Dataset {
            features: (0..len).map(|k| vec![k as f64]).collect(),
            labels: vec![1.0; len],
            feature_dim: 1,
        };
        match partition(&ds, nodes) {
            Ok(s) => {
                prop_assert!(len >= nodes);
                prop_assert_eq!(s.per_node(), len / nodes);
                prop_assert!(s.shards().iter().all(|sh| sh.len() == len / nodes));
                prop_assert_eq!(s.total(), len - len % nodes);
            }
            Err(_) => prop_assert!(len < nodes),
        }
    }

    #[test]
    fn random_geometric_graphs_are_connected(seed in any::<u64>(), n in 2usize..30) {
        let mut rng = stream(seed, 0, Purpose::Graph);
        let net = random_geometric_graph(n, 0.6, &mut rng, 10_000).unwrap();
        prop_assert!(net.is_connected());
    }
}

/// Reads the fixture by hand: label, then `index:value` pairs, 1-based.
fn naive_parse(text: &str, dim: usize) -> Vec<(f64, Vec<f64>)> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split_whitespace();
            let label: f64 = it.next().unwrap().parse().unwrap();
            let mut x = vec![0.0; dim];
            for tok in it {
                let (i, v) = tok.split_once(':').unwrap();
                x[i.parse::<usize>().unwrap() - 1] = v.parse().unwrap();
            }
            (label, x)
        })
        .collect()
}

#[test]
fn ten_line_fixture_matches_naive_reader() {
    let text = include_str!("../fixtures/ten_lines.libsvm");
    let ds = parse_libsvm(text.as_bytes(), None).unwrap();
    assert_eq!(ds.feature_dim, 10);
    let naive = naive_parse(text, 10);
    assert_eq!(ds.len(), naive.len());
    for (k, (label, x)) in naive.iter().enumerate() {
        assert_eq!(ds.labels[k], *label);
        assert_eq!(&ds.features[k], x);
    }
}

#[test]
fn path_laplacian_spectrum_is_closed_form() {
    for n in 2..12 {
        let net = Network::path(n).unwrap();
        let c = metropolis_weights(&net);
        let sp = Spectrum::compute(&c, &net).unwrap();
        for (k, v) in sp.laplacian_eigs.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos();
            assert!((v - exact).abs() < 1e-12, "n={n} k={k}: {v} vs {exact}");
        }
    }
}
