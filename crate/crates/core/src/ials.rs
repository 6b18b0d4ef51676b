//! Implicit alternating least squares with a global weight on unobserved
//! pairs and frequency-scaled ridge regularization.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Interactions;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperparams {
    pub d: usize,
    pub alpha0: f64,
    pub lambda: f64,
    pub reg_exponent: f64,
    pub sweeps: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            d: 16,
            alpha0: 0.02,
            lambda: 0.05,
            reg_exponent: 1.0,
            sweeps: 10,
            seed: 0,
            init_scale: 0.1,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::arg("d must be at least 1"));
        }
        if !(self.alpha0.is_finite() && self.alpha0 >= 0.0) {
            return Err(Error::arg(format!("alpha0 = {} must be finite and >= 0", self.alpha0)));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::arg(format!("lambda = {} must be finite and > 0", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.reg_exponent) {
            return Err(Error::arg(format!("reg_exponent = {} must be in [0, 1]", self.reg_exponent)));
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return Err(Error::arg(format!("init_scale = {} must be finite and >= 0", self.init_scale)));
        }
        Ok(())
    }
}

/// Row-major `rows x dim` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factors {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Factors {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::arg("factor rows must be non-empty with equal lengths"));
        }
        Ok(Self {
            rows: rows.len(),
            dim,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `F^T F`, accumulated over rows in ascending order.
    pub fn gramian(&self) -> Vec<f64> {
        let d = self.dim;
        let mut g = vec![0.0; d * d];
        for r in self.data.chunks_exact(d) {
            add_outer(&mut g, r, 1.0);
        }
        g
    }

    fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

fn add_outer(m: &mut [f64], x: &[f64], w: f64) {
    let d = x.len();
    for i in 0..d {
        let wi = w * x[i];
        for j in 0..d {
            m[i * d + j] += wi * x[j];
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorModel {
    pub user_factors: Factors,
    pub item_factors: Factors,
    pub hyperparams: Hyperparams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Users,
    Items,
}

impl FactorModel {
    pub fn new(user_factors: Factors, item_factors: Factors, hyperparams: Hyperparams) -> Result<Self> {
        hyperparams.validate()?;
        if user_factors.dim != hyperparams.d || item_factors.dim != hyperparams.d {
            return Err(Error::arg("factor dimension differs from hyperparams.d"));
        }
        if !user_factors.is_finite() || !item_factors.is_finite() {
            return Err(Error::Numeric("factor entries must be finite".into()));
        }
        Ok(Self {
            user_factors,
            item_factors,
            hyperparams,
        })
    }

    pub fn n_users(&self) -> usize {
        self.user_factors.rows
    }

    pub fn n_items(&self) -> usize {
        self.item_factors.rows
    }

    pub fn score(&self, u: usize, v: usize) -> f64 {
        dot(self.user_factors.row(u), self.item_factors.row(v))
    }

    fn check_shape(&self, x: &Interactions) -> Result<()> {
        if x.n_users() != self.n_users() || x.n_items() != self.n_items() {
            return Err(Error::arg(format!(
                "model is {} x {}, interactions are {} x {}",
                self.n_users(),
                self.n_items(),
                x.n_users(),
                x.n_items()
            )));
        }
        Ok(())
    }
}

/// Gaussian factors with standard deviation `init_scale / sqrt(d)`; user rows
/// are drawn before item rows.
pub fn init_model(n_users: usize, n_items: usize, hp: &Hyperparams) -> Result<FactorModel> {
    hp.validate()?;
    if n_users == 0 || n_items == 0 {
        return Err(Error::arg("model needs at least one user and one item"));
    }
    let sd = hp.init_scale / (hp.d as f64).sqrt();
    let normal = Normal::new(0.0, sd).map_err(|e| Error::arg(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut draw = |rows: usize| {
        let mut f = Factors::zeros(rows, hp.d);
        f.data.iter_mut().for_each(|x| *x = normal.sample(&mut rng));
        f
    };
    let user_factors = draw(n_users);
    let item_factors = draw(n_items);
    Ok(FactorModel {
        user_factors,
        item_factors,
        hyperparams: hp.clone(),
    })
}

/// `nu = (count + alpha0 * other_side_size)^reg_exponent` per row.
fn reg_weights(counts: &[usize], other: usize, hp: &Hyperparams) -> Vec<f64> {
    counts
        .iter()
        .map(|&c| (c as f64 + hp.alpha0 * other as f64).powf(hp.reg_exponent))
        .collect()
}

/// `sum_S (s - 1)^2 + alpha0 * sum_{not S} s^2 + lambda * (sum nu_u |phi|^2 + sum nu_v |psi|^2)`
/// where `s` is the dot-product score. The sum over unobserved pairs is the
/// Gramian trace `tr(G_U G_V)` minus the observed `s^2`.
pub fn objective(m: &FactorModel, x: &Interactions) -> Result<f64> {
    m.check_shape(x)?;
    let hp = &m.hyperparams;
    let mut fit = 0.0;
    let mut observed_sq = 0.0;
    for (u, v) in x.pairs() {
        let s = m.score(u as usize, v as usize);
        fit += (s - 1.0) * (s - 1.0);
        observed_sq += s * s;
    }
    let gu = m.user_factors.gramian();
    let gv = m.item_factors.gramian();
    let dense: f64 = gu.iter().zip(&gv).map(|(a, b)| a * b).sum();

    let ridge = |f: &Factors, nu: &[f64]| -> f64 { nu.iter().enumerate().map(|(i, w)| w * dot(f.row(i), f.row(i))).sum() };
    let nu_u = reg_weights(&x.user_counts(), x.n_items(), hp);
    let nu_v = reg_weights(&x.item_counts(), x.n_users(), hp);
    let reg = ridge(&m.user_factors, &nu_u) + ridge(&m.item_factors, &nu_v);

    let total = fit + hp.alpha0 * (dense - observed_sq) + hp.lambda * reg;
    if !total.is_finite() {
        return Err(Error::Numeric(format!("objective is not finite ({total})")));
    }
    Ok(total)
}

/// Solves `(alpha0 G + (1 - alpha0) sum psi psi^T + lambda nu I) phi = sum psi`
/// for one row given the fixed opposite factors.
fn solve_row(gram: &[f64], fixed: &Factors, support: &[u32], nu: f64, hp: &Hyperparams) -> Result<Vec<f64>> {
    let d = fixed.dim;
    if support.is_empty() {
        // No positives: the right-hand side is zero and the system is
        // positive semidefinite, so zero is a minimizer even when nu = 0.
        return Ok(vec![0.0; d]);
    }
    let mut a: Vec<f64> = gram.iter().map(|g| hp.alpha0 * g).collect();
    let mut b = vec![0.0; d];
    for &j in support {
        let psi = fixed.row(j as usize);
        add_outer(&mut a, psi, 1.0 - hp.alpha0);
        b.iter_mut().zip(psi).for_each(|(bi, p)| *bi += p);
    }
    let ridge = hp.lambda * nu;
    for i in 0..d {
        a[i * d + i] += ridge;
    }
    let chol = DMatrix::from_row_slice(d, d, &a)
        .cholesky()
        .ok_or_else(|| Error::Numeric("normal equations are not positive definite".into()))?;
    let sol = chol.solve(&DVector::from_vec(b));
    if sol.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("row solve produced a non-finite value".into()));
    }
    Ok(sol.as_slice().to_vec())
}

fn update_side(m: &mut FactorModel, x: &Interactions, side: Side) -> Result<()> {
    let hp = m.hyperparams.clone();
    let (target, fixed, counts, other) = match side {
        Side::Users => (&mut m.user_factors, &m.item_factors, x.user_counts(), x.n_items()),
        Side::Items => (&mut m.item_factors, &m.user_factors, x.item_counts(), x.n_users()),
    };
    let gram = fixed.gramian();
    let nu = reg_weights(&counts, other, &hp);
    let d = hp.d;
    target
        .data
        .par_chunks_mut(d)
        .enumerate()
        .try_for_each(|(i, row)| {
            let support = match side {
                Side::Users => x.user_items(i),
                Side::Items => x.item_users(i),
            };
            row.copy_from_slice(&solve_row(&gram, fixed, support, nu[i], &hp)?);
            Ok(())
        })
}

/// Replaces every row on `side` by its exact minimizer with the other side held fixed.
pub fn half_sweep(m: &FactorModel, x: &Interactions, side: Side) -> Result<FactorModel> {
    m.check_shape(x)?;
    m.hyperparams.validate()?;
    let mut out = m.clone();
    update_side(&mut out, x, side)?;
    Ok(out)
}

/// Trains from a fresh initialization. The trace holds the objective before
/// training and after each full sweep.
pub fn train(x: &Interactions, hp: &Hyperparams) -> Result<(FactorModel, Vec<f64>)> {
    let m = init_model(x.n_users(), x.n_items(), hp)?;
    train_from(m, x)
}

/// Continues alternating sweeps from an existing model.
pub fn train_from(mut m: FactorModel, x: &Interactions) -> Result<(FactorModel, Vec<f64>)> {
    if m.hyperparams.sweeps == 0 {
        return Err(Error::arg("sweeps must be at least 1"));
    }
    m.check_shape(x)?;
    m.hyperparams.validate()?;
    let mut trace = Vec::with_capacity(m.hyperparams.sweeps + 1);
    trace.push(objective(&m, x)?);
    for _ in 0..m.hyperparams.sweeps {
        update_side(&mut m, x, Side::Users)?;
        update_side(&mut m, x, Side::Items)?;
        trace.push(objective(&m, x)?);
    }
    Ok((m, trace))
}

/// The `k` best items for `query` among those not excluded, by descending
/// score with ties going to the lower index.
pub fn topk_for_vector(items: &Factors, query: &[f64], k: usize, exclude: &[u32]) -> Result<Vec<u32>> {
    let n = items.rows;
    let mut banned = vec![false; n];
    for &v in exclude {
        *banned
            .get_mut(v as usize)
            .ok_or_else(|| Error::arg(format!("excluded item {v} out of range")))? = true;
    }
    let available = banned.iter().filter(|b| !**b).count();
    if k > available {
        return Err(Error::arg(format!("K = {k} exceeds the {available} rankable items")));
    }
    let mut scored: Vec<(f64, u32)> = (0..n)
        .filter(|&v| !banned[v])
        .map(|v| (dot(items.row(v), query), v as u32))
        .collect();
    let cmp = |a: &(f64, u32), b: &(f64, u32)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    if k < scored.len() && k > 0 {
        scored.select_nth_unstable_by(k - 1, cmp);
        scored.truncate(k);
    }
    scored.sort_unstable_by(cmp);
    scored.truncate(k);
    Ok(scored.into_iter().map(|(_, v)| v).collect())
}

pub fn topk(m: &FactorModel, u: usize, k: usize, exclude: &[u32]) -> Result<Vec<u32>> {
    if u >= m.n_users() {
        return Err(Error::arg(format!("user {u} out of range")));
    }
    topk_for_vector(&m.item_factors, m.user_factors.row(u), k, exclude)
}

/// Embeds a user unseen in training from their items, with item factors fixed.
pub fn fold_in(m: &FactorModel, items: &[u32]) -> Result<Vec<f64>> {
    if let Some(&v) = items.iter().find(|&&v| v as usize >= m.n_items()) {
        return Err(Error::arg(format!("item {v} out of range")));
    }
    let hp = &m.hyperparams;
    let mut support = items.to_vec();
    support.sort_unstable();
    support.dedup();
    let nu = reg_weights(&[support.len()], m.n_items(), hp)[0];
    solve_row(&m.item_factors.gramian(), &m.item_factors, &support, nu, hp)
}

/// Items by descending training count, ties by ascending index.
pub fn popularity_baseline(x: &Interactions) -> Result<Vec<u32>> {
    if x.is_empty() {
        return Err(Error::EmptyDataset("popularity baseline needs interactions".into()));
    }
    let counts = x.item_counts();
    let mut order: Vec<u32> = (0..x.n_items() as u32).collect();
    order.sort_by(|&a, &b| counts[b as usize].cmp(&counts[a as usize]).then(a.cmp(&b)));
    Ok(order)
}

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format_version: u32,
    n_users: usize,
    n_items: usize,
    model: FactorModel,
}

pub fn save_model(m: &FactorModel, path: &Path) -> Result<()> {
    let ck = Checkpoint {
        format_version: CHECKPOINT_VERSION,
        n_users: m.n_users(),
        n_items: m.n_items(),
        model: m.clone(),
    };
    let text = serde_json::to_string(&ck).expect("checkpoint serializes");
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<FactorModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let format = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let ck: Checkpoint = serde_json::from_str(&text).map_err(|e| format(e.to_string()))?;
    if ck.format_version != CHECKPOINT_VERSION {
        return Err(format(format!("unsupported checkpoint version {}", ck.format_version)));
    }
    let m = ck.model;
    let consistent = |f: &Factors, rows: usize| f.rows == rows && f.data.len() == f.rows * f.dim;
    if !consistent(&m.user_factors, ck.n_users) || !consistent(&m.item_factors, ck.n_items) {
        return Err(format("factor matrix sizes disagree with the header".into()));
    }
    FactorModel::new(m.user_factors, m.item_factors, m.hyperparams).map_err(|e| format(e.to_string()))
}
