//! Labelled datasets: the synthetic generator, LIBSVM ingestion and the
//! split of samples across nodes.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: label {label:?} is not +1 or -1")]
    BadLabel { line: usize, label: String },
    #[error("line {line}: feature index {index} must be >= 1")]
    BadIndex { line: usize, index: i64 },
    #[error("line {line}: feature index {index} exceeds the configured dimension {dim}")]
    IndexBeyondDim { line: usize, index: usize, dim: usize },
    #[error("cannot split {points} points across {nodes} nodes")]
    TooFewPoints { points: usize, nodes: usize },
    #[error("invalid generator parameter: {0}")]
    BadParameter(String),
}

/// Dense features with ±1 labels.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
    /// Feature dimension (`d − 1`).
    pub feature_dim: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Per-node samples `(a_ij, b_ij)`, all shards the same size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeShards {
    shards: Vec<Vec<(Vec<f64>, f64)>>,
    feature_dim: usize,
}

impl NodeShards {
    pub fn new(shards: Vec<Vec<(Vec<f64>, f64)>>, feature_dim: usize) -> Self {
        Self { shards, feature_dim }
    }

    pub fn shards(&self) -> &[Vec<(Vec<f64>, f64)>] {
        &self.shards
    }

    pub fn nodes(&self) -> usize {
        self.shards.len()
    }

    pub fn per_node(&self) -> usize {
        self.shards.first().map_or(0, Vec::len)
    }

    /// Optimization dimension `d` (features plus intercept).
    pub fn dim(&self) -> usize {
        self.feature_dim + 1
    }

    pub fn total(&self) -> usize {
        self.shards.iter().map(Vec::len).sum()
    }
}

/// Synthetic classification data and the vector that generated its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub shards: NodeShards,
    /// `(x₁⋆, x₀⋆)`, intercept last.
    pub true_x: Vec<f64>,
}

/// Gaussian features, a Gaussian "true" separator and labels
/// `b = sign(x₁⋆ᵀa + x₀⋆ + ε)`, `ε ~ N(0, noise_sd²)`, with `sign(0) = +1`.
pub fn gen_synthetic<R: Rng + ?Sized>(
    nodes: usize,
    per_node: usize,
    feature_dim: usize,
    noise_sd: f64,
    rng: &mut R,
) -> Result<SyntheticData, DataError> {
    if nodes == 0 || per_node == 0 || feature_dim == 0 {
        return Err(DataError::BadParameter("counts must be positive".into()));
    }
    let noise = Normal::new(0.0, noise_sd).map_err(|e| DataError::BadParameter(e.to_string()))?;
    let true_x: Vec<f64> = (0..=feature_dim).map(|_| StandardNormal.sample(rng)).collect();
    let (w, w0) = true_x.split_at(feature_dim);
    let shards = (0..nodes)
        .map(|_| {
            (0..per_node)
                .map(|_| {
                    let a: Vec<f64> = (0..feature_dim).map(|_| StandardNormal.sample(rng)).collect();
                    let eps = noise.sample(rng);
                    let score: f64 = a.iter().zip(w).map(|(x, y)| x * y).sum::<f64>() + w0[0] + eps;
                    (a, label_of(score))
                })
                .collect()
        })
        .collect();
    Ok(SyntheticData { shards: NodeShards::new(shards, feature_dim), true_x })
}

pub fn label_of(score: f64) -> f64 {
    if score >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Parses LIBSVM text `<label> <idx>:<val> ...` with 1-based indices.
///
/// Features are densified to `dim` when given, otherwise to the largest
/// index seen. Blank lines are skipped.
pub fn parse_libsvm(text: &[u8], dim: Option<usize>) -> Result<Dataset, DataError> {
    let text = String::from_utf8_lossy(text);
    let mut sparse: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let mut tokens = l.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line");
        let label = match label_tok.parse::<f64>() {
            Ok(v) if v == 1.0 || v == -1.0 => v,
            _ => return Err(DataError::BadLabel { line, label: label_tok.to_string() }),
        };
        let mut feats = Vec::new();
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| DataError::Malformed {
                line,
                msg: format!("expected index:value, got {tok:?}"),
            })?;
            let idx: i64 = idx.parse().map_err(|_| DataError::Malformed {
                line,
                msg: format!("bad feature index {idx:?}"),
            })?;
            if idx < 1 {
                return Err(DataError::BadIndex { line, index: idx });
            }
            let idx = idx as usize;
            if let Some(d) = dim {
                if idx > d {
                    return Err(DataError::IndexBeyondDim { line, index: idx, dim: d });
                }
            }
            let val: f64 = val.parse().map_err(|_| DataError::Malformed {
                line,
                msg: format!("bad feature value {val:?}"),
            })?;
            max_index = max_index.max(idx);
            feats.push((idx - 1, val));
        }
        sparse.push(feats);
        labels.push(label);
    }
    let feature_dim = dim.unwrap_or(max_index);
    let features = sparse
        .into_iter()
        .map(|feats| {
            let mut dense = vec![0.0; feature_dim];
            for (i, v) in feats {
                dense[i] = v;
            }
            dense
        })
        .collect();
    Ok(Dataset { features, labels, feature_dim })
}

/// Writes the dataset in LIBSVM form, omitting zero features.
pub fn to_libsvm(ds: &Dataset) -> String {
    let mut s = String::new();
    for (a, b) in ds.features.iter().zip(&ds.labels) {
        s.push_str(if *b > 0.0 { "+1" } else { "-1" });
        for (i, v) in a.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            let _ = write!(s, " {}:{}", i + 1, v);
        }
        s.push('\n');
    }
    s
}

/// Contiguous equal blocks in file order; the trailing `len mod nodes`
/// points are dropped.
pub fn partition(ds: &Dataset, nodes: usize) -> Result<NodeShards, DataError> {
    if nodes == 0 || ds.len() < nodes {
        return Err(DataError::TooFewPoints { points: ds.len(), nodes });
    }
    let per = ds.len() / nodes;
    let shards = (0..nodes)
        .map(|i| {
            (i * per..(i + 1) * per)
                .map(|k| (ds.features[k].clone(), ds.labels[k]))
                .collect()
        })
        .collect();
    Ok(NodeShards::new(shards, ds.feature_dim))
}

/// Like [`partition`] after a seeded shuffle of the points.
pub fn partition_shuffled<R: Rng + ?Sized>(ds: &Dataset, nodes: usize, rng: &mut R) -> Result<NodeShards, DataError> {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.shuffle(rng);
    let shuffled = Dataset {
        features: order.iter().map(|&k| ds.features[k].clone()).collect(),
        labels: order.iter().map(|&k| ds.labels[k]).collect(),
        feature_dim: ds.feature_dim,
    };
    partition(&shuffled, nodes)
}
