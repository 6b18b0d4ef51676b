use std::path::{Path, PathBuf};

use dotrank::dataset::{filter_kcore, load_interactions, Interactions, KeepRule, StrongSplitSpec};
use dotrank::exact::serde_rational;
use dotrank::exact::Rational;
use dotrank::feedback::LoopConfig;
use dotrank::ials::Hyperparams;
use dotrank::metrics::{PopularityScale, RecallNormalization};
use dotrank::popcone::ConeProblem;
use dotrank::rankgeom::{cyclic_polytope, ItemVectorSet};
use dotrank::synthetic::{generate, SyntheticSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Makes a relative path relative to the directory holding the config file.
pub fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    Csv(CsvDataset),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvDataset {
    pub path: PathBuf,
    #[serde(default)]
    pub keep: KeepRule,
    /// Minimum items per user after k-core filtering; 0 disables filtering.
    #[serde(default)]
    pub min_user: usize,
    #[serde(default)]
    pub min_item: usize,
}

impl DatasetConfig {
    pub fn resolve(&mut self, base: &Path) {
        if let DatasetConfig::Csv(c) = self {
            resolve(base, &mut c.path);
        }
    }

    pub fn load(&self) -> Result<Interactions, CliError> {
        match self {
            DatasetConfig::Csv(c) => {
                let x = load_interactions(&c.path, c.keep)?;
                if c.min_user > 0 || c.min_item > 0 {
                    Ok(filter_kcore(&x, c.min_user, c.min_item)?)
                } else {
                    Ok(x)
                }
            }
            DatasetConfig::Synthetic(spec) => Ok(generate(spec)?),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub dataset: DatasetConfig,
    pub hyperparams: Hyperparams,
    /// When present, held-out users are removed before training and the
    /// split is written next to the model.
    #[serde(default)]
    pub split: Option<StrongSplitSpec>,
}

fn default_ks() -> Vec<usize> {
    vec![5, 20, 50]
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub dataset: DatasetConfig,
    pub model: PathBuf,
    pub split: PathBuf,
    #[serde(default = "default_ks")]
    pub ks: Vec<usize>,
    #[serde(default)]
    pub recall_normalization: RecallNormalization,
    #[serde(default)]
    pub popularity_scale: PopularityScale,
    /// Also score the most-popular baseline.
    #[serde(default = "yes")]
    pub baseline: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopRunConfig {
    pub dataset: DatasetConfig,
    #[serde(rename = "loop")]
    pub loop_config: LoopConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorSource {
    File(PathBuf),
    Inline(ItemVectorSet),
    Cyclic {
        n: usize,
        d: usize,
        /// Moment-curve parameters; defaults to `1..=n`.
        #[serde(default, deserialize_with = "opt_rationals", serialize_with = "ser_opt_rationals")]
        t: Option<Vec<Rational>>,
    },
}

fn opt_rationals<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
    serde_rational::vec(d).map(Some)
}

fn ser_opt_rationals<S: serde::Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
    serde_rational::ser_opt_vec(v, s)
}

impl VectorSource {
    pub fn resolve(&mut self, base: &Path) {
        if let VectorSource::File(p) = self {
            resolve(base, p);
        }
    }

    /// The vectors plus, for cyclic polytopes, their parameters.
    pub fn load(&self) -> Result<(ItemVectorSet, Option<Vec<Rational>>), CliError> {
        match self {
            VectorSource::File(p) => Ok((ItemVectorSet::load(p)?, None)),
            VectorSource::Inline(v) => Ok((v.clone(), None)),
            VectorSource::Cyclic { n, d, t } => {
                let t = t.clone().unwrap_or_else(|| (1..=*n as i64).map(dotrank::exact::int).collect());
                Ok((cyclic_polytope(*n, *d, &t)?, Some(t)))
            }
        }
    }
}

fn default_guard() -> u64 {
    dotrank::rankgeom::EnumerationGuard::default().max_candidates
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NrankConfig {
    pub vectors: VectorSource,
    /// List lengths to enumerate; defaults to `n`.
    #[serde(default)]
    pub ks: Vec<usize>,
    #[serde(default = "yes")]
    pub facets: bool,
    #[serde(default)]
    pub list_permutations: bool,
    #[serde(default = "default_guard")]
    pub max_candidates: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeSource {
    File(PathBuf),
    Inline(ConeProblem),
}

impl ConeSource {
    pub fn load(&self) -> Result<ConeProblem, CliError> {
        match self {
            ConeSource::File(p) => Ok(ConeProblem::load(p)?),
            ConeSource::Inline(c) => Ok(c.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapConfig {
    pub theta: f64,
    pub dims: Vec<usize>,
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConesConfig {
    pub problem: ConeSource,
    #[serde(default, deserialize_with = "serde_rational::matrix", serialize_with = "serde_rational::ser_matrix")]
    pub points: Vec<Vec<Rational>>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cap: Option<CapConfig>,
}

impl ConesConfig {
    pub fn resolve(&mut self, base: &Path) {
        if let ConeSource::File(p) = &mut self.problem {
            resolve(base, p);
        }
    }
}
