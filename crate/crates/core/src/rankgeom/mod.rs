//! Exact lab for rankings a dot-product model can express.
//!
//! A query `q` over item vectors `v_1..v_n` ranks items by `<q, v_i>`. A
//! K-permutation is representable when some `q` puts exactly those K items on
//! top, in that order, with no ties. Deciding this is a homogeneous system of
//! strict inequalities, which becomes an LP with margin one.
//!
//! Items are 0-based throughout.

mod ae;
mod bounds;
mod cyclic;
mod enumerate;
mod facets;
mod linalg;
mod represent;

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::exact::{serde_rational, RVec, Rational};
use crate::{Error, Result};

pub use ae::{ae_rank_equivalence, Activation, RankAgreement};
pub use bounds::{falling_factorial, power_bound, region_bound, BoundChecks};
pub use cyclic::{cyclic_polytope, gale_facets, moment_curve};
pub use enumerate::{
    count_feasible_preferences, enumerate_representable, k_permutations, EnumerationGuard,
    EnumerationResult,
};
pub use facets::{facet_permutation, facets, Facet};
pub use represent::{
    is_representable, is_representable_with, lp_feasible, represents, Encoding,
    PairwisePreference, RepresentabilityWitness,
};

/// `n` distinct exact vectors in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorFile", into = "VectorFile")]
pub struct ItemVectorSet {
    d: usize,
    vectors: Vec<RVec>,
}

#[derive(Serialize, Deserialize)]
struct VectorFile {
    d: usize,
    #[serde(
        deserialize_with = "serde_rational::matrix",
        serialize_with = "serde_rational::ser_matrix"
    )]
    vectors: Vec<RVec>,
}

impl TryFrom<VectorFile> for ItemVectorSet {
    type Error = Error;

    fn try_from(f: VectorFile) -> Result<Self> {
        if f.vectors.iter().any(|v| v.len() != f.d) {
            return Err(Error::arg(format!("every vector must have {} coordinates", f.d)));
        }
        ItemVectorSet::new(f.vectors)
    }
}

impl From<ItemVectorSet> for VectorFile {
    fn from(v: ItemVectorSet) -> Self {
        VectorFile {
            d: v.d,
            vectors: v.vectors,
        }
    }
}

impl ItemVectorSet {
    pub fn new(vectors: Vec<RVec>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::arg("item vector set is empty"));
        };
        let d = first.len();
        if d == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        if let Some(i) = vectors.iter().position(|v| v.len() != d) {
            return Err(Error::arg(format!("vector {i} has dimension {}, expected {d}", vectors[i].len())));
        }
        let mut seen = HashSet::with_capacity(vectors.len());
        for (i, v) in vectors.iter().enumerate() {
            if !seen.insert(v) {
                return Err(Error::arg(format!("vector {i} duplicates an earlier vector")));
            }
        }
        Ok(Self { d, vectors })
    }

    /// Builds from small integer coordinates.
    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| crate::exact::int(v)).collect())
                .collect(),
        )
    }

    /// Exact conversion of float coordinates.
    pub fn from_f64(rows: &[Vec<f64>]) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let v: Option<RVec> = r.iter().map(|&x| crate::exact::from_f64(x)).collect();
            out.push(v.ok_or_else(|| Error::arg("non-finite coordinate"))?);
        }
        Self::new(out)
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vectors(&self) -> &[RVec] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[Rational] {
        &self.vectors[i]
    }

    /// Appends `extra` zero coordinates to every vector.
    pub fn zero_padded(&self, extra: usize) -> Self {
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let mut v = v.clone();
                v.extend(std::iter::repeat_n(crate::exact::int(0), extra));
                v
            })
            .collect();
        Self {
            d: self.d + extra,
            vectors,
        }
    }

    /// True when no `d + 1` vectors lie on a common affine hyperplane.
    pub fn is_general_position(&self) -> bool {
        linalg::general_position(&self.vectors, self.d)
    }

    /// True when no two difference vectors `v_i - v_j` are parallel, i.e. the
    /// `C(n,2)` central hyperplanes they define are pairwise distinct.
    pub fn arrangement_hyperplanes_distinct(&self) -> bool {
        let mut diffs = Vec::new();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                diffs.push(crate::exact::sub(&self.vectors[i], &self.vectors[j]));
            }
        }
        for a in 0..diffs.len() {
            for b in a + 1..diffs.len() {
                if linalg::rank(&[diffs[a].clone(), diffs[b].clone()]) < 2 {
                    return false;
                }
            }
        }
        true
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// A ranked list of `K` distinct items out of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialPermutation(Vec<usize>);

impl PartialPermutation {
    pub fn new(entries: Vec<usize>, n: usize) -> Result<Self> {
        if entries.is_empty() || entries.len() > n {
            return Err(Error::arg(format!(
                "permutation length {} must be in 1..={n}",
                entries.len()
            )));
        }
        let mut seen = vec![false; n];
        for &e in &entries {
            if e >= n {
                return Err(Error::arg(format!("item {e} out of range for n = {n}")));
            }
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::arg(format!("item {e} repeated")));
            }
        }
        Ok(Self(entries))
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub(crate) fn from_unchecked(entries: Vec<usize>) -> Self {
        Self(entries)
    }
}
