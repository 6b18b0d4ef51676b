//! Popularity cones.
//!
//! Fix popular items `P` and long-tail items `L`. Queries that rank every
//! `p_i` at least as high as every `l_j` form the cone `Q(P, L)`. An item `s`
//! is forced above the long tail when `<q, s> >= max_j <q, l_j>` for every
//! such query. Membership in the two sufficient regions below is decided
//! exactly by LP and comes with a non-negative certificate:
//!
//! * singleton tail: `s = l + sum_i lambda_i (p_i - l)`;
//! * general tail: `s = sum_i mu_i p_i + sum_{i,j} lambda_ij (p_i - l_j)` with
//!   `mu` on the simplex.

mod beta;
mod cap;

use std::path::Path;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{dot, int, ratio, serde_rational, sub, Constraint, LinearProgram, LpOutcome, RVec, Rational, Relation};
use crate::rankgeom::{lp_feasible, RepresentabilityWitness};
use crate::{Error, Result};

pub use beta::{ln_gamma, regularized_incomplete_beta};
pub use cap::{cap_decay_profile, spherical_cap_ratio, CapRow};

/// Popular set `P` and long-tail set `L` in a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeFile", into = "ConeFile")]
pub struct ConeProblem {
    d: usize,
    popular: Vec<RVec>,
    long_tail: Vec<RVec>,
}

#[derive(Serialize, Deserialize)]
struct ConeFile {
    d: usize,
    #[serde(rename = "P", deserialize_with = "serde_rational::matrix", serialize_with = "serde_rational::ser_matrix")]
    popular: Vec<RVec>,
    #[serde(rename = "L", deserialize_with = "serde_rational::matrix", serialize_with = "serde_rational::ser_matrix")]
    long_tail: Vec<RVec>,
}

impl TryFrom<ConeFile> for ConeProblem {
    type Error = Error;

    fn try_from(f: ConeFile) -> Result<Self> {
        let p = ConeProblem::new(f.popular, f.long_tail)?;
        if p.d != f.d {
            return Err(Error::arg(format!("vectors have dimension {}, file says {}", p.d, f.d)));
        }
        Ok(p)
    }
}

impl From<ConeProblem> for ConeFile {
    fn from(p: ConeProblem) -> Self {
        ConeFile {
            d: p.d,
            popular: p.popular,
            long_tail: p.long_tail,
        }
    }
}

impl ConeProblem {
    pub fn new(popular: Vec<RVec>, long_tail: Vec<RVec>) -> Result<Self> {
        if popular.is_empty() || long_tail.is_empty() {
            return Err(Error::arg("both P and L need at least one vector"));
        }
        let d = popular[0].len();
        if d == 0 || popular.iter().chain(&long_tail).any(|v| v.len() != d) {
            return Err(Error::arg("all cone vectors must share a positive dimension"));
        }
        Ok(Self {
            d,
            popular,
            long_tail,
        })
    }

    pub fn from_ints(popular: &[Vec<i64>], long_tail: &[Vec<i64>]) -> Result<Self> {
        let conv = |rows: &[Vec<i64>]| rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::new(conv(popular), conv(long_tail))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn popular(&self) -> &[RVec] {
        &self.popular
    }

    pub fn long_tail(&self) -> &[RVec] {
        &self.long_tail
    }

    pub fn with_popular(&self, p: RVec) -> Result<Self> {
        let mut popular = self.popular.clone();
        popular.push(p);
        Self::new(popular, self.long_tail.clone())
    }

    pub fn with_long_tail(&self, l: RVec) -> Result<Self> {
        let mut long_tail = self.long_tail.clone();
        long_tail.push(l);
        Self::new(self.popular.clone(), long_tail)
    }

    /// Rows `p_i - l_j` in `i`-major order.
    fn gaps(&self) -> Vec<RVec> {
        let mut out = Vec::with_capacity(self.popular.len() * self.long_tail.len());
        for p in &self.popular {
            for l in &self.long_tail {
                out.push(sub(p, l));
            }
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    fn check_point(&self, s: &[Rational]) -> Result<()> {
        if s.len() != self.d {
            return Err(Error::arg(format!("point has dimension {}, expected {}", s.len(), self.d)));
        }
        Ok(())
    }
}

/// Membership verdict plus the certificate that rebuilds the point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeMembershipResult {
    pub member: bool,
    /// Convex weights on `P` (general tail only).
    #[serde(serialize_with = "serde_rational::ser_opt_vec")]
    pub mu: Option<RVec>,
    /// Ray weights: one per `p_i` for a singleton tail, one per `(i, j)` in
    /// `i`-major order otherwise.
    #[serde(serialize_with = "serde_rational::ser_opt_vec")]
    pub lambda: Option<RVec>,
}

impl ConeMembershipResult {
    fn rejected() -> Self {
        Self {
            member: false,
            mu: None,
            lambda: None,
        }
    }
}

/// A strictly interior query: `<q, p_i - l_j> >= 1` for all pairs.
///
/// `Q(P, L)` always contains `0`; infeasibility here means that no
/// hyperplane separates `P` from `L` with positive margin.
pub fn query_set_witness(prob: &ConeProblem) -> Result<RepresentabilityWitness> {
    lp_feasible(prob.d, &prob.gaps())
}

/// Non-negative `x` with `sum_k x_k g_k = target` (plus an optional
/// normalization `sum_{k < simplex} x_k = 1`).
fn conic_combination(generators: &[RVec], target: &[Rational], simplex: usize) -> Option<RVec> {
    let d = target.len();
    let mut lp = LinearProgram::new(generators.len());
    for r in 0..d {
        let row = generators.iter().map(|g| g[r].clone()).collect();
        lp.add(Constraint::new(row, Relation::Eq, target[r].clone()));
    }
    if simplex > 0 {
        let row = (0..generators.len())
            .map(|k| if k < simplex { Rational::one() } else { Rational::zero() })
            .collect();
        lp.add(Constraint::new(row, Relation::Eq, Rational::one()));
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Decides `s - l = sum_i lambda_i (p_i - l)` with `lambda >= 0`.
pub fn in_singleton_cone(popular: &[RVec], l: &[Rational], s: &[Rational]) -> Result<ConeMembershipResult> {
    if popular.is_empty() || popular.iter().any(|p| p.len() != l.len()) || s.len() != l.len() {
        return Err(Error::arg("popular vectors, l and s must share a dimension"));
    }
    let gens: Vec<RVec> = popular.iter().map(|p| sub(p, l)).collect();
    Ok(match conic_combination(&gens, &sub(s, l), 0) {
        Some(lambda) => ConeMembershipResult {
            member: true,
            mu: None,
            lambda: Some(lambda),
        },
        None => ConeMembershipResult::rejected(),
    })
}

/// Decides membership in `conv(P) + cone{p_i - l_j}`.
pub fn in_multi_cone(prob: &ConeProblem, s: &[Rational]) -> Result<ConeMembershipResult> {
    prob.check_point(s)?;
    let mut gens = prob.popular.clone();
    gens.extend(prob.gaps());
    let k = prob.popular.len();
    Ok(match conic_combination(&gens, s, k) {
        Some(mut x) => {
            let lambda = x.split_off(k);
            ConeMembershipResult {
                member: true,
                mu: Some(x),
                lambda: Some(lambda),
            }
        }
        None => ConeMembershipResult::rejected(),
    })
}

/// Rebuilds the point described by a membership certificate.
pub fn reconstruct(prob: &ConeProblem, single_l: Option<usize>, cert: &ConeMembershipResult) -> Option<RVec> {
    let lambda = cert.lambda.as_ref()?;
    let mut out = vec![Rational::zero(); prob.d];
    let mut add = |v: &[Rational], w: &Rational| {
        for (o, x) in out.iter_mut().zip(v) {
            *o += w * x;
        }
    };
    match single_l {
        Some(j) => {
            let l = &prob.long_tail[j];
            add(l, &Rational::one());
            for (p, w) in prob.popular.iter().zip(lambda) {
                add(&sub(p, l), w);
            }
        }
        None => {
            for (p, w) in prob.popular.iter().zip(cert.mu.as_ref()?) {
                add(p, w);
            }
            for (g, w) in prob.gaps().iter().zip(lambda) {
                add(g, w);
            }
        }
    }
    Some(out)
}

/// A query in the closure of `Q(P, {l})` that ranks `s` strictly below `l`:
/// `<q, p_i - l> >= 0` and `<q, l - s> >= 1`. Exists exactly when `s` is
/// outside the singleton cone.
pub fn singleton_counter_witness(popular: &[RVec], l: &[Rational], s: &[Rational]) -> Result<Option<RVec>> {
    let d = l.len();
    if popular.iter().any(|p| p.len() != d) || s.len() != d {
        return Err(Error::arg("popular vectors, l and s must share a dimension"));
    }
    let mut lp = LinearProgram::free(d);
    for p in popular {
        lp.add(Constraint::new(sub(p, l), Relation::Ge, Rational::zero()));
    }
    lp.add(Constraint::new(sub(l, s), Relation::Ge, Rational::one()));
    Ok(lp.solve().solution().map(<[Rational]>::to_vec))
}

/// `<q, s> >= max_j <q, l_j>`, evaluated exactly.
pub fn dominates(prob: &ConeProblem, q: &[Rational], s: &[Rational]) -> bool {
    let qs = dot(q, s);
    prob.long_tail.iter().all(|l| qs >= dot(q, l))
}

/// Draws strictly feasible queries and checks that `s` beats the long tail
/// under each of them.
///
/// Each sample maximizes a random integer direction over the feasible queries
/// clipped to a box, then mixes that vertex with the interior witness using a
/// random rational weight. Every sample keeps margin at least one on all
/// `p_i - l_j`.
pub fn sample_feasible_queries(prob: &ConeProblem, trials: usize, seed: u64) -> Result<Vec<RVec>> {
    let witness = query_set_witness(prob)?;
    let Some(center) = witness.q else {
        return Err(Error::arg("Q(P, L) has no strictly feasible query"));
    };
    let d = prob.d;
    let bound = crate::exact::rational::max_abs(center.iter().cloned()) * int(2) + int(1);
    let gaps = prob.gaps();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let dir: RVec = (0..d).map(|_| int(rng.random_range(-10..=10))).collect();
        let mut lp = LinearProgram::free(d);
        for g in &gaps {
            lp.add(Constraint::new(g.clone(), Relation::Ge, Rational::one()));
        }
        for k in 0..d {
            let mut e = vec![Rational::zero(); d];
            e[k] = Rational::one();
            lp.add(Constraint::new(e.clone(), Relation::Le, bound.clone()));
            lp.add(Constraint::new(e, Relation::Ge, -bound.clone()));
        }
        lp.maximize(dir);
        let vertex = match lp.solve() {
            LpOutcome::Optimal { x, .. } => x,
            _ => return Err(Error::Numeric("bounded query LP failed".into())),
        };
        let w = ratio(rng.random_range(0..=16), 16);
        let q: RVec = vertex
            .iter()
            .zip(&center)
            .map(|(v, c)| &w * v + (Rational::one() - &w) * c)
            .collect();
        out.push(q);
    }
    Ok(out)
}

pub fn dominance_check(prob: &ConeProblem, s: &[Rational], trials: usize, seed: u64) -> Result<bool> {
    prob.check_point(s)?;
    let qs = sample_feasible_queries(prob, trials, seed)?;
    Ok(qs.iter().all(|q| dominates(prob, q, s)))
}

/// `(|P| + 1) |L|`.
pub fn cone_dimension_bound(prob: &ConeProblem) -> u64 {
    ((prob.popular.len() + 1) * prob.long_tail.len()) as u64
}
