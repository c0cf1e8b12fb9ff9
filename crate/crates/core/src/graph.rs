//! Communication graphs, consensus weight matrices and their spectra.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

/// Placement retries before [`random_geometric_graph`] gives up.
pub const DEFAULT_ATTEMPTS: usize = 1000;

/// Default lower bound on `λ_N(C)` when a weight matrix has to be shifted.
pub const DEFAULT_KAPPA: f64 = 0.1;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("a network needs at least two nodes, got {0}")]
    TooFewNodes(usize),
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({0}, {1}) appears twice")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),
    #[error("network is not connected")]
    Disconnected,
    #[error("radius {0} outside (0, sqrt(2)]")]
    BadRadius(f64),
    #[error("no connected placement found in {attempts} attempts (radius {radius} too small?)")]
    NoConnectedPlacement { attempts: usize, radius: f64 },
    #[error("invalid weight matrix: {0}")]
    InvalidWeights(String),
    #[error("symmetric eigensolver did not converge")]
    EigenNoConvergence,
    #[error("edge list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Connected, undirected, simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    positions: Option<Vec<[f64; 2]>>,
}

impl Network {
    /// Builds and validates a network. Each unordered pair must appear once.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let net = Self::unchecked(n, edges)?;
        if !net.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(net)
    }

    fn unchecked(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewNodes(n));
        }
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::NodeOutOfRange(a, b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a, b));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            normalized.push(e);
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        adjacency.iter_mut().for_each(|nb| nb.sort_unstable());
        normalized.sort_unstable();
        Ok(Self { n, edges: normalized, adjacency, positions: None })
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Self::new(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::new(n, &edges)
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbourhood `Ω_i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// The 0/1 graph Laplacian `𝓛 = diag(deg) − A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            l[(i, j)] = -1.0;
            l[(j, i)] = -1.0;
            l[(i, i)] += 1.0;
            l[(j, j)] += 1.0;
        }
        l
    }

    /// Edge-list text: a header line `n m`, then `m` lines `i j` (0-based).
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for (i, j) in &self.edges {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_pair = |line: usize, l: &str| -> Result<(usize, usize), GraphError> {
            let mut it = l.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(GraphError::Parse { line, msg: format!("expected two integers, got {l:?}") }),
            }
        };
        let (line, header) = lines
            .next()
            .ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
        let (n, m) = parse_pair(line, header)?;
        let edges = lines.map(|(k, l)| parse_pair(k, l)).collect::<Result<Vec<_>, _>>()?;
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 1,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, &edges)
    }
}

/// Uniform placement on the unit square, edge iff distance `< radius`,
/// resampled until the graph is connected.
pub fn random_geometric_graph<R: Rng + ?Sized>(
    n: usize,
    radius: f64,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Network, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewNodes(n));
    }
    if !(radius > 0.0 && radius <= std::f64::consts::SQRT_2) {
        return Err(GraphError::BadRadius(radius));
    }
    for _ in 0..max_attempts {
        let pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]);
                if (dx * dx + dy * dy).sqrt() < radius {
                    edges.push((i, j));
                }
            }
        }
        let mut net = Network::unchecked(n, &edges)?;
        if net.is_connected() {
            net.positions = Some(pos);
            return Ok(net);
        }
    }
    Err(GraphError::NoConnectedPlacement { attempts: max_attempts, radius })
}

/// Probability that two uniform points of the unit square lie within
/// distance `r` (valid for `r ≤ 1`).
pub fn pair_within_probability(r: f64) -> f64 {
    let r = r.min(1.0);
    std::f64::consts::PI * r * r - 8.0 / 3.0 * r.powi(3) + 0.5 * r.powi(4)
}

/// Radius whose expected edge count (before conditioning on connectivity)
/// equals `edges` for `n` nodes.
pub fn radius_for_expected_edges(n: usize, edges: f64) -> f64 {
    let pairs = (n * (n - 1)) as f64 / 2.0;
    let target = (edges / pairs).clamp(0.0, pair_within_probability(1.0));
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if pair_within_probability(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Symmetric stochastic consensus weights supported on the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    c: DMatrix<f64>,
    /// Off-diagonal weights `(j, C_ij)` for `j ∈ Ω_i`, in neighbour order.
    rows: Vec<Vec<(usize, f64)>>,
}

impl WeightMatrix {
    /// Wraps a dense matrix, taking the sparsity pattern from `net`.
    pub fn from_dense(net: &Network, c: DMatrix<f64>) -> Result<Self, GraphError> {
        let n = net.nodes();
        if c.nrows() != n || c.ncols() != n {
            return Err(GraphError::InvalidWeights(format!("expected {n}x{n}, got {}x{}", c.nrows(), c.ncols())));
        }
        let rows = (0..n)
            .map(|i| net.neighbors(i).iter().map(|&j| (j, c[(i, j)])).collect())
            .collect();
        let w = Self { c, rows };
        w.validate(net)?;
        Ok(w)
    }

    /// Checks symmetry, stochasticity, nonnegativity, the support pattern
    /// and a strictly positive diagonal. Definiteness is checked separately.
    pub fn validate(&self, net: &Network) -> Result<(), GraphError> {
        let n = net.nodes();
        let bad = |m: String| Err(GraphError::InvalidWeights(m));
        for i in 0..n {
            let row_sum: f64 = self.c.row(i).iter().sum();
            if (row_sum - 1.0).abs() > 1e-12 {
                return bad(format!("row {i} sums to {row_sum}"));
            }
            if self.c[(i, i)] <= 0.0 {
                return bad(format!("diagonal entry {i} is not positive"));
            }
            for j in 0..n {
                let v = self.c[(i, j)];
                if (v - self.c[(j, i)]).abs() > 1e-14 {
                    return bad(format!("asymmetric at ({i}, {j})"));
                }
                if v < 0.0 {
                    return bad(format!("negative entry at ({i}, {j})"));
                }
                let is_edge = net.neighbors(i).binary_search(&j).is_ok();
                if i != j && is_edge != (v > 0.0) {
                    return bad(format!("entry ({i}, {j}) = {v} does not match the edge set"));
                }
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        self.c.nrows()
    }

    pub fn dense(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[(i, j)]
    }

    pub fn self_weight(&self, i: usize) -> f64 {
        self.c[(i, i)]
    }

    /// `(j, C_ij)` over the neighbours of `i`.
    pub fn neighbor_weights(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, GraphError> {
        sym_eigenvalues_desc(&self.c)
    }
}

/// Metropolis rule: `C_ij = 1/(1 + max(deg_i, deg_j))` on edges, the rest
/// of each row's mass on the diagonal.
pub fn metropolis_weights(net: &Network) -> WeightMatrix {
    let n = net.nodes();
    let mut c = DMatrix::zeros(n, n);
    for &(i, j) in net.edges() {
        let w = 1.0 / (1.0 + net.degree(i).max(net.degree(j)) as f64);
        c[(i, j)] = w;
        c[(j, i)] = w;
    }
    for i in 0..n {
        let off: f64 = net.neighbors(i).iter().map(|&j| c[(i, j)]).sum();
        c[(i, i)] = 1.0 - off;
    }
    WeightMatrix::from_dense(net, c).expect("Metropolis weights are valid by construction")
}

/// Equal weights `C = I − c0·𝓛`. Requires `c0·max_degree < 1`.
pub fn equal_weights(net: &Network, c0: f64) -> Result<WeightMatrix, GraphError> {
    if !(c0 > 0.0 && c0 * (net.max_degree() as f64) < 1.0) {
        return Err(GraphError::InvalidWeights(format!(
            "c0 = {c0} must be positive with c0 * max_degree < 1"
        )));
    }
    let n = net.nodes();
    let mut c = DMatrix::identity(n, n) - net.laplacian() * c0;
    // exact row sums
    for i in 0..n {
        let off: f64 = net.neighbors(i).iter().map(|&j| c[(i, j)]).sum();
        c[(i, i)] = 1.0 - off;
    }
    WeightMatrix::from_dense(net, c)
}

/// Lazy version `((κ+1)/2)·I + ((1−κ)/2)·C`, whose smallest eigenvalue
/// exceeds `κ`. The sparsity pattern is unchanged.
pub fn ensure_positive_definite(net: &Network, c: &WeightMatrix, kappa: f64) -> Result<WeightMatrix, GraphError> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(GraphError::InvalidWeights(format!("kappa = {kappa} outside (0, 1)")));
    }
    let n = c.nodes();
    let a = (kappa + 1.0) / 2.0;
    let b = (1.0 - kappa) / 2.0;
    let mut out = c.dense() * b;
    for i in 0..n {
        let off: f64 = net.neighbors(i).iter().map(|&j| out[(i, j)]).sum();
        out[(i, i)] = 1.0 - off;
        debug_assert!((out[(i, i)] - (a + b * c.self_weight(i))).abs() < 1e-12);
    }
    WeightMatrix::from_dense(net, out)
}

/// Spectral data of `C` and of the 0/1 Laplacian of its graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub lambda2_c: f64,
    pub lambda_n_c: f64,
    /// Ascending: `λ_1(𝓛) = 0 ≤ λ_2(𝓛) ≤ … ≤ λ_N(𝓛)`.
    pub laplacian_eigs: Vec<f64>,
}

impl Spectrum {
    pub fn compute(c: &WeightMatrix, net: &Network) -> Result<Self, GraphError> {
        let eig_c = c.eigenvalues()?;
        let mut lap = sym_eigenvalues_desc(&net.laplacian())?;
        lap.reverse();
        Ok(Self {
            lambda2_c: eig_c[1],
            lambda_n_c: *eig_c.last().expect("n >= 2"),
            laplacian_eigs: lap,
        })
    }

    pub fn laplacian_lambda2(&self) -> f64 {
        self.laplacian_eigs[1]
    }

    pub fn spectral_gap(&self) -> f64 {
        1.0 - self.lambda2_c
    }
}

/// Eigenvalues of a symmetric matrix, largest first.
pub fn sym_eigenvalues_desc(m: &DMatrix<f64>) -> Result<Vec<f64>, GraphError> {
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000 * m.nrows().max(1))
        .ok_or(GraphError::EigenNoConvergence)?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(GraphError::EigenNoConvergence);
    }
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}
