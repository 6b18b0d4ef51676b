//! Seeded synthetic interaction data with low-rank structure and optional
//! Zipf-skewed item popularity.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gumbel, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::Interactions;
use crate::{Error, Result};

/// Each user picks `per_user` distinct items. The chance of item `v` grows
/// with `exp(signal * <a_u, b_v> / sqrt(rank)) * popularity_v`, where
/// `popularity_v = r_v^{-zipf_exponent}` and `r_v` is a random popularity
/// rank starting at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_users: usize,
    pub n_items: usize,
    pub rank: usize,
    pub per_user: usize,
    #[serde(default = "default_signal")]
    pub signal: f64,
    #[serde(default)]
    pub zipf_exponent: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_signal() -> f64 {
    4.0
}

impl SyntheticSpec {
    /// Pure low-rank preferences with uniform popularity.
    pub fn low_rank(n_users: usize, n_items: usize, rank: usize, seed: u64) -> Self {
        Self {
            n_users,
            n_items,
            rank,
            per_user: (n_items / 15).max(2),
            signal: default_signal(),
            zipf_exponent: 0.0,
            seed,
        }
    }

    /// Low-rank preferences on top of a Zipf popularity law.
    pub fn popularity_skewed(n_users: usize, n_items: usize, zipf_exponent: f64, seed: u64) -> Self {
        Self {
            n_users,
            n_items,
            rank: 8,
            per_user: (n_items / 15).max(2),
            signal: 2.0,
            zipf_exponent,
            seed,
        }
    }
}

pub fn generate(spec: &SyntheticSpec) -> Result<Interactions> {
    if spec.n_users == 0 || spec.n_items == 0 || spec.rank == 0 {
        return Err(Error::arg("synthetic data needs positive n_users, n_items and rank"));
    }
    if spec.per_user == 0 || spec.per_user > spec.n_items {
        return Err(Error::arg(format!("per_user = {} must be in 1..={}", spec.per_user, spec.n_items)));
    }
    if !spec.signal.is_finite() || !spec.zipf_exponent.is_finite() || spec.zipf_exponent < 0.0 {
        return Err(Error::arg("signal must be finite and zipf_exponent finite and non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.rank;
    let gauss = |count: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..count).map(|_| StandardNormal.sample(rng)).collect()
    };
    let users = gauss(spec.n_users * r, &mut rng);
    let items = gauss(spec.n_items * r, &mut rng);
    let mut pop_rank: Vec<usize> = (1..=spec.n_items).collect();
    pop_rank.shuffle(&mut rng);
    let log_pop: Vec<f64> = pop_rank.iter().map(|&k| -spec.zipf_exponent * (k as f64).ln()).collect();

    let scale = spec.signal / (r as f64).sqrt();
    let gumbel = Gumbel::new(0.0, 1.0).expect("valid Gumbel");
    let mut pairs = Vec::with_capacity(spec.n_users * spec.per_user);
    let mut keys = vec![(0.0f64, 0u32); spec.n_items];
    for u in 0..spec.n_users {
        let a = &users[u * r..(u + 1) * r];
        for (v, key) in keys.iter_mut().enumerate() {
            let b = &items[v * r..(v + 1) * r];
            let logit = scale * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() + log_pop[v];
            // Gumbel-top-k draws without replacement from the softmax.
            *key = (logit + rng.sample(gumbel), v as u32);
        }
        keys.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        pairs.extend(keys[..spec.per_user].iter().map(|&(_, v)| (u as u32, v)));
    }
    Interactions::from_pairs(spec.n_users, spec.n_items, pairs)
}
