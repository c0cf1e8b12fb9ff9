//! Row-major storage for one `d`-vector per node.

use serde::{Deserialize, Serialize};

/// `n` stacked points of dimension `d`, row `i` belonging to node `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeStack {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl NodeStack {
    pub fn zeros(n: usize, d: usize) -> Self {
        Self { n, d, data: vec![0.0; n * d] }
    }

    /// Every row equal to `point`.
    pub fn replicate(n: usize, point: &[f64]) -> Self {
        let d = point.len();
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n {
            data.extend_from_slice(point);
        }
        Self { n, d, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * d);
        for r in rows {
            assert_eq!(r.len(), d, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { n, d, data }
    }

    pub fn from_flat(n: usize, d: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * d);
        Self { n, d, data }
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d.max(1)).take(self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Network average `x̄ = (1/n) Σ x_i`.
    pub fn mean_row(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        for r in self.rows() {
            for (a, b) in m.iter_mut().zip(r) {
                *a += b;
            }
        }
        let inv = 1.0 / self.n as f64;
        m.iter_mut().for_each(|v| *v *= inv);
        m
    }

    /// `‖(I − J) x‖`, the disagreement norm.
    pub fn disagreement(&self) -> f64 {
        let mean = self.mean_row();
        self.rows()
            .flat_map(|r| r.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn distance(&self, other: &NodeStack) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &NodeStack) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disagreement_of_two_scalars() {
        let x = NodeStack::from_rows(&[vec![0.0], vec![2.0]]);
        assert_eq!(x.mean_row(), vec![1.0]);
        assert!((x.disagreement() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn consensus_has_no_disagreement() {
        let x = NodeStack::replicate(5, &[1.5, -2.0, 0.25]);
        assert_eq!(x.disagreement(), 0.0);
    }
}
