//! Ranking accuracy, popularity bias, catalog coverage and exposure
//! inequality over per-user top-K lists.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-user ranked lists, each at most `k` long with distinct items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopKTable {
    k: usize,
    lists: Vec<Vec<u32>>,
}

impl TopKTable {
    pub fn new(k: usize, lists: Vec<Vec<u32>>) -> Result<Self> {
        for (i, list) in lists.iter().enumerate() {
            if list.len() > k {
                return Err(Error::arg(format!("list {i} has {} items, more than K = {k}", list.len())));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::arg(format!("list {i} repeats an item")));
            }
        }
        Ok(Self { k, lists })
    }

    /// Keeps only the first `k` entries of each list.
    pub fn truncated(lists: &[Vec<u32>], k: usize) -> Result<Self> {
        Self::new(k, lists.iter().map(|l| l[..k.min(l.len())].to_vec()).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lists(&self) -> &[Vec<u32>] {
        &self.lists
    }

    pub fn push(&mut self, list: Vec<u32>) -> Result<()> {
        let checked = Self::new(self.k, vec![list])?;
        self.lists.extend(checked.lists);
        Ok(())
    }
}

/// How many times each item appears across a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyVector(pub Vec<u64>);

impl FrequencyVector {
    pub fn from_table(table: &TopKTable, n_items: usize) -> Result<Self> {
        let mut c = vec![0u64; n_items];
        for &v in table.lists.iter().flatten() {
            *c.get_mut(v as usize)
                .ok_or_else(|| Error::arg(format!("item {v} outside {n_items} items")))? += 1;
        }
        Ok(Self(c))
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RecallNormalization {
    /// Divide hits by `min(K, |holdout|)`.
    #[default]
    MinKHoldout,
    /// Divide hits by `K`.
    K,
}

pub fn recall_at_k(list: &[u32], holdout: &[u32], k: usize, norm: RecallNormalization) -> Result<f64> {
    if holdout.is_empty() {
        return Err(Error::arg("recall needs a non-empty holdout"));
    }
    if k == 0 {
        return Err(Error::arg("K must be at least 1"));
    }
    let hits = list.iter().take(k).filter(|v| holdout.contains(v)).count();
    let denom = match norm {
        RecallNormalization::MinKHoldout => k.min(holdout.len()),
        RecallNormalization::K => k,
    };
    Ok(hits as f64 / denom as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PopularityScale {
    /// `count / total count`.
    #[default]
    Relative,
    Raw,
}

/// Mean over users of the mean popularity of their listed items. Empty lists
/// are skipped.
pub fn arp_at_k(table: &TopKTable, item_counts: &[usize], scale: PopularityScale) -> Result<f64> {
    let total: usize = item_counts.iter().sum();
    if total == 0 {
        return Err(Error::arg("item counts sum to zero"));
    }
    let denom = match scale {
        PopularityScale::Relative => total as f64,
        PopularityScale::Raw => 1.0,
    };
    let mut sum = 0.0;
    let mut users = 0usize;
    for list in table.lists.iter().filter(|l| !l.is_empty()) {
        let mut s = 0.0;
        for &v in list {
            let c = *item_counts
                .get(v as usize)
                .ok_or_else(|| Error::arg(format!("item {v} has no training count")))?;
            s += c as f64 / denom;
        }
        sum += s / list.len() as f64;
        users += 1;
    }
    if users == 0 {
        return Err(Error::arg("ARP needs at least one non-empty list"));
    }
    Ok(sum / users as f64)
}

/// Fraction of the catalog appearing in at least one list.
pub fn coverage_at_k(table: &TopKTable, n_items: usize) -> Result<f64> {
    if n_items == 0 {
        return Err(Error::arg("coverage needs n_items >= 1"));
    }
    let freq = FrequencyVector::from_table(table, n_items)?;
    Ok(freq.0.iter().filter(|&&c| c > 0).count() as f64 / n_items as f64)
}

/// `-(2 |c|_1 |V|^2)^{-1} sum_{j,l} |c_j - c_l|` over ordered pairs. Larger is
/// more even exposure; the value lies in `[-1, 0]`.
pub fn negative_gini_at_k(freq: &FrequencyVector, n_items: usize) -> Result<f64> {
    if freq.0.len() > n_items {
        return Err(Error::arg(format!("{} frequencies for {n_items} items", freq.0.len())));
    }
    let total = freq.total();
    if total == 0 {
        return Err(Error::arg("negative Gini needs a non-zero frequency vector"));
    }
    let mut c = freq.0.clone();
    c.resize(n_items, 0);
    c.sort_unstable();
    // With c ascending, sum_{j,l} |c_j - c_l| = 2 sum_i (2i - n + 1) c_i.
    let n = n_items as i128;
    let half: i128 = c.iter().enumerate().map(|(i, &ci)| (2 * i as i128 - n + 1) * ci as i128).sum();
    let pair_sum = 2 * half;
    Ok(-(pair_sum as f64) / (2.0 * total as f64 * (n_items as f64).powi(2)))
}

/// One `(metric, K, value)` row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub metric: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub value: f64,
}

impl MetricRecord {
    pub fn new(metric: &str, k: usize, value: f64) -> Self {
        Self {
            metric: metric.to_string(),
            k,
            value,
        }
    }
}

pub fn write_metrics_json(records: &[MetricRecord], path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(records).expect("records serialize");
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_metrics_csv<W: Write>(records: &[MetricRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()
}
