//! Closed-loop simulation: train on what has been observed, recommend, and
//! observe the recommended items that the user actually likes.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{split_weak, Interactions, WeakSplitSpec};
use crate::ials::{init_model, topk, train, train_from, Hyperparams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopConfig {
    pub epochs: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub hp: Hyperparams,
    pub initial_observed_fraction: f64,
    pub seed: u64,
    /// Continue from the previous epoch's model instead of retraining.
    #[serde(default)]
    pub warm_start: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub user_recall_mean: f64,
    pub user_recall_median: f64,
    pub item_recall_mean: f64,
    pub item_recall_median: f64,
    pub new_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopTrajectory {
    pub records: Vec<EpochRecord>,
}

impl LoopTrajectory {
    /// CSV with header
    /// `epoch,user_recall_mean,user_recall_median,item_recall_mean,item_recall_median,new_pairs`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Users,
    Items,
}

/// For every user (or item) with at least one true pair, the share of its
/// true pairs that have been observed.
pub fn per_entity_recall(observed: &Interactions, truth: &Interactions, axis: Axis) -> Result<Vec<f64>> {
    if observed.n_users() != truth.n_users() || observed.n_items() != truth.n_items() {
        return Err(Error::arg("observed and truth have different shapes"));
    }
    if let Some((u, v)) = observed.pairs().find(|&(u, v)| !truth.contains(u, v)) {
        return Err(Error::arg(format!("observed pair ({u}, {v}) is not in the ground truth")));
    }
    let (obs, tru) = match axis {
        Axis::Users => (observed.user_counts(), truth.user_counts()),
        Axis::Items => (observed.item_counts(), truth.item_counts()),
    };
    Ok(obs
        .iter()
        .zip(&tru)
        .filter(|(_, &t)| t > 0)
        .map(|(&o, &t)| o as f64 / t as f64)
        .collect())
}

fn mean_and_lower_median(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    (mean, sorted[(sorted.len() - 1) / 2])
}

fn record(epoch: usize, observed: &Interactions, truth: &Interactions, new_pairs: usize) -> Result<EpochRecord> {
    let (user_recall_mean, user_recall_median) = mean_and_lower_median(&per_entity_recall(observed, truth, Axis::Users)?);
    let (item_recall_mean, item_recall_median) = mean_and_lower_median(&per_entity_recall(observed, truth, Axis::Items)?);
    Ok(EpochRecord {
        epoch,
        user_recall_mean,
        user_recall_median,
        item_recall_mean,
        item_recall_median,
        new_pairs,
    })
}

/// Epoch 0 observes a per-user fraction of `full`; each later epoch trains on
/// the observed pairs, recommends up to `K` unobserved items per user, and
/// observes those that are true pairs. When fewer than `K` unobserved items
/// remain, all of them are recommended.
pub fn run_feedback_loop(full: &Interactions, cfg: &LoopConfig) -> Result<LoopTrajectory> {
    if full.is_empty() {
        return Err(Error::EmptyDataset("feedback loop needs interactions".into()));
    }
    if cfg.epochs == 0 || cfg.k == 0 {
        return Err(Error::arg("epochs and K must be at least 1"));
    }
    cfg.hp.validate()?;
    let split = split_weak(
        full,
        &WeakSplitSpec {
            observed_fraction: cfg.initial_observed_fraction,
            seed: cfg.seed,
        },
    )?;
    let mut observed = split.observed;
    let mut records = vec![record(0, &observed, full, 0)?];
    let mut model = init_model(full.n_users(), full.n_items(), &cfg.hp)?;

    for epoch in 1..=cfg.epochs {
        model = if cfg.warm_start && epoch > 1 {
            train_from(model, &observed)?.0
        } else {
            train(&observed, &cfg.hp)?.0
        };
        let found: Vec<Vec<u32>> = (0..full.n_users())
            .into_par_iter()
            .map(|u| {
                let seen = observed.user_items(u);
                let k = cfg.k.min(full.n_items() - seen.len());
                let list = topk(&model, u, k, seen)?;
                Ok(list.into_iter().filter(|&v| full.contains(u as u32, v)).collect())
            })
            .collect::<Result<_>>()?;
        let new_pairs: usize = found.iter().map(Vec::len).sum();
        let grown = observed
            .pairs()
            .chain(found.iter().enumerate().flat_map(|(u, vs)| vs.iter().map(move |&v| (u as u32, v))));
        observed = observed.with_same_shape(grown.collect::<Vec<_>>())?;
        records.push(record(epoch, &observed, full, new_pairs)?);
    }
    Ok(LoopTrajectory { records })
}
