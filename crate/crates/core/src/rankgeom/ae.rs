//! Autoencoder-style scoring `z = f(W q + b)` ranks items exactly like the
//! dot-product model with item matrix `[W b]` and query `[q; 1]` whenever `f`
//! is order-preserving.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Sigmoid,
    Tanh,
    Softmax,
}

impl Activation {
    pub fn apply(self, x: &[f64]) -> Vec<f64> {
        match self {
            Activation::Identity => x.to_vec(),
            Activation::Sigmoid => x.iter().map(|&v| 1.0 / (1.0 + (-v).exp())).collect(),
            Activation::Tanh => x.iter().map(|&v| v.tanh()).collect(),
            Activation::Softmax => {
                let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = x.iter().map(|&v| (v - m).exp()).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|v| v / s).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankAgreement {
    Equal,
    Differ,
    /// Some scores tie, so the ranking is not uniquely defined.
    Tie,
}

fn argsort_desc(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    idx
}

fn has_tie(x: &[f64], order: &[usize]) -> bool {
    order.windows(2).any(|w| x[w[0]] == x[w[1]])
}

/// Compares the ranking of `f(W q + b)` with that of `[W b] [q; 1]`.
pub fn ae_rank_equivalence(w: &[Vec<f64>], b: &[f64], q: &[f64], f: Activation) -> Result<RankAgreement> {
    if w.len() != b.len() {
        return Err(Error::arg("W and b disagree on the number of items"));
    }
    if w.iter().any(|row| row.len() != q.len()) {
        return Err(Error::arg("W rows must match the query dimension"));
    }
    let pre: Vec<f64> = w
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().zip(q).map(|(a, x)| a * x).sum::<f64>() + bi)
        .collect();
    let z = f.apply(&pre);

    let mut q1 = q.to_vec();
    q1.push(1.0);
    let dot: Vec<f64> = w
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().chain(std::iter::once(bi)).zip(&q1).map(|(a, x)| a * x).sum())
        .collect();

    let (rz, rd) = (argsort_desc(&z), argsort_desc(&dot));
    if has_tie(&z, &rz) || has_tie(&dot, &rd) {
        return Ok(RankAgreement::Tie);
    }
    Ok(if rz == rd {
        RankAgreement::Equal
    } else {
        RankAgreement::Differ
    })
}
