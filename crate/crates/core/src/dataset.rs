//! Implicit-feedback datasets: CSV ingestion with binarization, k-core
//! filtering, and strong/weak generalization splits.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slack for float products such as `0.7 * 10` before rounding.
const ROUNDING_SLACK: f64 = 1e-9;

/// Binary user-item feedback. Pairs are unique; each user's items and each
/// item's users are kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interactions {
    by_user: Vec<Vec<u32>>,
    by_item: Vec<Vec<u32>>,
    n_pairs: usize,
    user_ids: Vec<String>,
    item_ids: Vec<String>,
}

impl Interactions {
    /// Builds from index pairs; duplicates collapse.
    pub fn from_pairs(n_users: usize, n_items: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut by_user = vec![Vec::new(); n_users];
        for (u, v) in pairs {
            if u as usize >= n_users || v as usize >= n_items {
                return Err(Error::arg(format!(
                    "pair ({u}, {v}) outside {n_users} users x {n_items} items"
                )));
            }
            by_user[u as usize].push(v);
        }
        Ok(Self::from_rows(by_user, n_items))
    }

    fn from_rows(mut by_user: Vec<Vec<u32>>, n_items: usize) -> Self {
        let mut by_item = vec![Vec::new(); n_items];
        let mut n_pairs = 0;
        for (u, items) in by_user.iter_mut().enumerate() {
            items.sort_unstable();
            items.dedup();
            n_pairs += items.len();
            for &v in items.iter() {
                by_item[v as usize].push(u as u32);
            }
        }
        let user_ids = (0..by_user.len()).map(|u| u.to_string()).collect();
        let item_ids = (0..n_items).map(|v| v.to_string()).collect();
        Self {
            by_user,
            by_item,
            n_pairs,
            user_ids,
            item_ids,
        }
    }

    /// An interaction set over the same users and items, holding only `pairs`.
    pub fn with_same_shape(&self, pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut out = Self::from_pairs(self.n_users(), self.n_items(), pairs)?;
        out.user_ids = self.user_ids.clone();
        out.item_ids = self.item_ids.clone();
        Ok(out)
    }

    pub fn n_users(&self) -> usize {
        self.by_user.len()
    }

    pub fn n_items(&self) -> usize {
        self.by_item.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn is_empty(&self) -> bool {
        self.n_pairs == 0
    }

    pub fn user_items(&self, u: usize) -> &[u32] {
        &self.by_user[u]
    }

    pub fn item_users(&self, v: usize) -> &[u32] {
        &self.by_item[v]
    }

    pub fn user_counts(&self) -> Vec<usize> {
        self.by_user.iter().map(Vec::len).collect()
    }

    pub fn item_counts(&self) -> Vec<usize> {
        self.by_item.iter().map(Vec::len).collect()
    }

    pub fn contains(&self, u: u32, v: u32) -> bool {
        self.by_user
            .get(u as usize)
            .is_some_and(|items| items.binary_search(&v).is_ok())
    }

    /// Pairs in `(user, item)` ascending order.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.by_user
            .iter()
            .enumerate()
            .flat_map(|(u, items)| items.iter().map(move |&v| (u as u32, v)))
    }

    pub fn user_ids(&self) -> &[String] {
        &self.user_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }
}

/// Which explicit ratings become positive feedback.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum KeepRule {
    /// Every listed pair counts.
    #[default]
    All,
    /// `rating > threshold`.
    Above(f64),
    /// `rating >= threshold`.
    AtLeast(f64),
}

impl KeepRule {
    fn keeps(self, rating: f64) -> bool {
        match self {
            KeepRule::All => true,
            KeepRule::Above(t) => rating > t,
            KeepRule::AtLeast(t) => rating >= t,
        }
    }
}

/// Reads `user,item,rating[,timestamp]` rows and keeps the pairs that pass
/// `rule`. Ids get indices in order of first appearance among kept rows.
/// A first row whose rating column is not numeric is treated as a header.
pub fn load_interactions(path: &Path, rule: KeepRule) -> Result<Interactions> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut user_index: HashMap<String, u32> = HashMap::new();
    let mut item_index: HashMap<String, u32> = HashMap::new();
    let mut user_ids = Vec::new();
    let mut item_ids = Vec::new();
    let mut pairs = Vec::new();

    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(row as u64 + 1, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !(3..=4).contains(&record.len()) {
            return Err(parse_err(line, format!("expected 3 or 4 columns, found {}", record.len())));
        }
        let rating: f64 = match record[2].parse() {
            Ok(r) => r,
            Err(_) if row == 0 => continue,
            Err(_) => return Err(parse_err(line, format!("rating {:?} is not a number", &record[2]))),
        };
        if !rating.is_finite() {
            return Err(parse_err(line, "rating is not finite".into()));
        }
        if let Some(ts) = record.get(3).filter(|s| !s.is_empty()) {
            ts.parse::<i64>()
                .map_err(|_| parse_err(line, format!("timestamp {ts:?} is not an integer")))?;
        }
        let (user, item) = (&record[0], &record[1]);
        if user.is_empty() || item.is_empty() {
            return Err(parse_err(line, "empty user or item id".into()));
        }
        if !rule.keeps(rating) {
            continue;
        }
        let u = *user_index.entry(user.to_string()).or_insert_with(|| {
            user_ids.push(user.to_string());
            user_ids.len() as u32 - 1
        });
        let v = *item_index.entry(item.to_string()).or_insert_with(|| {
            item_ids.push(item.to_string());
            item_ids.len() as u32 - 1
        });
        pairs.push((u, v));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyDataset(format!("{} has no rows passing the keep rule", path.display())));
    }
    let mut out = Interactions::from_pairs(user_ids.len(), item_ids.len(), pairs)?;
    out.user_ids = user_ids;
    out.item_ids = item_ids;
    Ok(out)
}

/// Repeatedly drops users with fewer than `min_user` items and items with
/// fewer than `min_item` users until nothing changes. Survivors are
/// re-indexed in their original order. "More than 20" is `min = 21`.
pub fn filter_kcore(x: &Interactions, min_user: usize, min_item: usize) -> Result<Interactions> {
    let mut user_alive = vec![true; x.n_users()];
    let mut item_alive = vec![true; x.n_items()];
    let mut user_count = x.user_counts();
    let mut item_count = x.item_counts();
    loop {
        let mut changed = false;
        for u in 0..x.n_users() {
            if user_alive[u] && user_count[u] < min_user {
                user_alive[u] = false;
                changed = true;
                for &v in x.user_items(u) {
                    if item_alive[v as usize] {
                        item_count[v as usize] -= 1;
                    }
                }
            }
        }
        for v in 0..x.n_items() {
            if item_alive[v] && item_count[v] < min_item {
                item_alive[v] = false;
                changed = true;
                for &u in x.item_users(v) {
                    if user_alive[u as usize] {
                        user_count[u as usize] -= 1;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let remap = |alive: &[bool]| {
        let mut next = 0u32;
        alive
            .iter()
            .map(|&a| {
                a.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect::<Vec<Option<u32>>>()
    };
    let (umap, imap) = (remap(&user_alive), remap(&item_alive));
    let n_users = umap.iter().flatten().count();
    let n_items = imap.iter().flatten().count();
    let pairs: Vec<(u32, u32)> = x
        .pairs()
        .filter_map(|(u, v)| Some((umap[u as usize]?, imap[v as usize]?)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "k-core filter (users >= {min_user}, items >= {min_item}) removed every pair"
        )));
    }
    let mut out = Interactions::from_pairs(n_users, n_items, pairs)?;
    out.user_ids = (0..x.n_users()).filter(|&u| user_alive[u]).map(|u| x.user_ids[u].clone()).collect();
    out.item_ids = (0..x.n_items()).filter(|&v| item_alive[v]).map(|v| x.item_ids[v].clone()).collect();
    Ok(out)
}

fn check_fraction(name: &str, f: f64, allow_one: bool) -> Result<()> {
    let ok = f > 0.0 && (f < 1.0 || (allow_one && f == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::arg(format!("{name} = {f} must be in (0, 1{}", if allow_one { "]" } else { ")" })))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongSplitSpec {
    pub held_out_user_fraction: f64,
    pub fold_in_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakSplitSpec {
    pub observed_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SplitSpec {
    Strong(StrongSplitSpec),
    Weak(WeakSplitSpec),
}

/// A held-out user's items, split into the part shown to the model and the
/// part it must recover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalUser {
    pub user: u32,
    pub fold_in: Vec<u32>,
    pub holdout: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongSplit {
    /// Same index space as the input; held-out users have no pairs.
    pub train: Interactions,
    pub eval_users: Vec<EvalUser>,
    /// Held-out users with fewer than two items.
    pub skipped_users: Vec<u32>,
}

/// Holds out `floor(fraction * n_users)` users chosen by a seeded shuffle.
/// Each held-out user keeps `floor(fold_in_fraction * count)` items for
/// fold-in, clamped to `1..count`, and the rest become the holdout.
pub fn split_strong(x: &Interactions, spec: &StrongSplitSpec) -> Result<StrongSplit> {
    check_fraction("held_out_user_fraction", spec.held_out_user_fraction, false)?;
    check_fraction("fold_in_fraction", spec.fold_in_fraction, false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_held = (spec.held_out_user_fraction * x.n_users() as f64 + ROUNDING_SLACK).floor() as usize;
    let mut users: Vec<u32> = (0..x.n_users() as u32).collect();
    users.shuffle(&mut rng);
    let mut held: Vec<u32> = users[..n_held].to_vec();
    held.sort_unstable();

    let mut is_held = vec![false; x.n_users()];
    let mut eval_users = Vec::new();
    let mut skipped_users = Vec::new();
    for &u in &held {
        is_held[u as usize] = true;
        let mut items = x.user_items(u as usize).to_vec();
        if items.len() < 2 {
            skipped_users.push(u);
            continue;
        }
        items.shuffle(&mut rng);
        let n = items.len();
        let k = ((spec.fold_in_fraction * n as f64 + ROUNDING_SLACK).floor() as usize).clamp(1, n - 1);
        let mut fold_in = items[..k].to_vec();
        let mut holdout = items[k..].to_vec();
        fold_in.sort_unstable();
        holdout.sort_unstable();
        eval_users.push(EvalUser {
            user: u,
            fold_in,
            holdout,
        });
    }
    let train = x.with_same_shape(x.pairs().filter(|&(u, _)| !is_held[u as usize]))?;
    Ok(StrongSplit {
        train,
        eval_users,
        skipped_users,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakSplit {
    pub observed: Interactions,
    /// Pairs withheld from `observed`, ascending.
    pub hidden: Vec<(u32, u32)>,
}

/// Observes `ceil(fraction * count)` of each user's pairs, chosen by a seeded
/// shuffle; the rest are hidden.
pub fn split_weak(x: &Interactions, spec: &WeakSplitSpec) -> Result<WeakSplit> {
    check_fraction("observed_fraction", spec.observed_fraction, true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut observed = Vec::with_capacity(x.n_pairs());
    let mut hidden = Vec::new();
    for u in 0..x.n_users() {
        let mut items = x.user_items(u).to_vec();
        items.shuffle(&mut rng);
        let n = items.len();
        let k = ((spec.observed_fraction * n as f64 - ROUNDING_SLACK).ceil() as usize).min(n);
        observed.extend(items[..k].iter().map(|&v| (u as u32, v)));
        let mut rest: Vec<(u32, u32)> = items[k..].iter().map(|&v| (u as u32, v)).collect();
        rest.sort_unstable();
        hidden.extend(rest);
    }
    Ok(WeakSplit {
        observed: x.with_same_shape(observed)?,
        hidden,
    })
}

/// JSON record of a strong split, enough to rebuild it from the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub spec: StrongSplitSpec,
    pub n_users: usize,
    pub n_items: usize,
    pub train_users: Vec<u32>,
    pub eval_users: Vec<EvalUser>,
    pub skipped_users: Vec<u32>,
}

impl SplitManifest {
    pub fn from_split(spec: &StrongSplitSpec, split: &StrongSplit) -> Self {
        let train_users = (0..split.train.n_users())
            .filter(|&u| !split.train.user_items(u).is_empty())
            .map(|u| u as u32)
            .collect();
        Self {
            spec: *spec,
            n_users: split.train.n_users(),
            n_items: split.train.n_items(),
            train_users,
            eval_users: split.eval_users.clone(),
            skipped_users: split.skipped_users.clone(),
        }
    }

    /// Training interactions: the pairs of `train_users` in `full`.
    pub fn train_interactions(&self, full: &Interactions) -> Result<Interactions> {
        if full.n_users() != self.n_users || full.n_items() != self.n_items {
            return Err(Error::arg(format!(
                "manifest is for {} x {}, dataset is {} x {}",
                self.n_users,
                self.n_items,
                full.n_users(),
                full.n_items()
            )));
        }
        let mut keep = vec![false; full.n_users()];
        for &u in &self.train_users {
            *keep.get_mut(u as usize).ok_or_else(|| Error::arg("manifest user out of range"))? = true;
        }
        full.with_same_shape(full.pairs().filter(|&(u, _)| keep[u as usize]))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}
