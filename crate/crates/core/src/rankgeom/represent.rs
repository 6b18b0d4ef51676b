use serde::Serialize;

use num_traits::{One, Zero};

use super::{ItemVectorSet, PartialPermutation};
use crate::exact::{dot, serde_rational, sub, Constraint, LinearProgram, LpOutcome, RVec, Relation};
use crate::{Error, Result};

/// Outcome of a strict-feasibility question, with the query vector when one
/// exists. A returned `q` satisfies every constraint with margin at least one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentabilityWitness {
    pub feasible: bool,
    #[serde(serialize_with = "serde_rational::ser_opt_vec")]
    pub q: Option<RVec>,
}

impl RepresentabilityWitness {
    pub fn infeasible() -> Self {
        Self {
            feasible: false,
            q: None,
        }
    }

    pub fn witness(q: RVec) -> Self {
        Self {
            feasible: true,
            q: Some(q),
        }
    }
}

/// Finds `q` in `R^d` with `<q, a_k> >= 1` for every row.
///
/// By homogeneity this is the same question as `<q, a_k> > 0`.
pub fn lp_feasible(d: usize, constraints: &[RVec]) -> Result<RepresentabilityWitness> {
    if let Some(k) = constraints.iter().position(|a| a.len() != d) {
        return Err(Error::arg(format!(
            "constraint {k} has dimension {}, expected {d}",
            constraints[k].len()
        )));
    }
    if constraints.iter().any(|a| a.iter().all(Zero::is_zero)) {
        return Ok(RepresentabilityWitness::infeasible());
    }
    let mut lp = LinearProgram::free(d);
    for a in constraints {
        lp.add(Constraint::new(a.clone(), Relation::Ge, One::one()));
    }
    Ok(match lp.solve() {
        LpOutcome::Optimal { x, .. } => RepresentabilityWitness::witness(x),
        _ => RepresentabilityWitness::infeasible(),
    })
}

/// How the ranking constraints are written down. Both describe the same set
/// of query vectors; `Adjacent` relies on transitivity to drop redundant rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Encoding {
    #[default]
    Adjacent,
    FullPairwise,
}

fn ranking_constraints(v: &ItemVectorSet, pi: &PartialPermutation, enc: Encoding) -> Vec<RVec> {
    let e = pi.entries();
    let k = e.len();
    let mut in_pi = vec![false; v.n()];
    for &i in e {
        in_pi[i] = true;
    }
    let mut rows = Vec::new();
    match enc {
        Encoding::Adjacent => {
            for w in e.windows(2) {
                rows.push(sub(v.vector(w[0]), v.vector(w[1])));
            }
        }
        Encoding::FullPairwise => {
            for a in 0..k {
                for b in a + 1..k {
                    rows.push(sub(v.vector(e[a]), v.vector(e[b])));
                }
            }
        }
    }
    let last = v.vector(e[k - 1]);
    for j in (0..v.n()).filter(|&j| !in_pi[j]) {
        rows.push(sub(last, v.vector(j)));
    }
    rows
}

fn check_permutation(v: &ItemVectorSet, pi: &PartialPermutation) -> Result<()> {
    if pi.entries().iter().any(|&i| i >= v.n()) {
        return Err(Error::arg(format!("permutation refers to items outside 0..{}", v.n())));
    }
    Ok(())
}

/// Decides whether some `q` ranks `pi` on top of `v`, in order, without ties.
pub fn is_representable(v: &ItemVectorSet, pi: &PartialPermutation) -> Result<RepresentabilityWitness> {
    is_representable_with(v, pi, Encoding::Adjacent)
}

pub fn is_representable_with(
    v: &ItemVectorSet,
    pi: &PartialPermutation,
    enc: Encoding,
) -> Result<RepresentabilityWitness> {
    check_permutation(v, pi)?;
    lp_feasible(v.d(), &ranking_constraints(v, pi, enc))
}

/// Checks directly, without an LP, that `q` represents `pi`: strictly
/// decreasing scores along `pi` and the last listed item strictly above every
/// unlisted one.
pub fn represents(v: &ItemVectorSet, pi: &PartialPermutation, q: &[crate::exact::Rational]) -> bool {
    if q.len() != v.d() || pi.entries().iter().any(|&i| i >= v.n()) {
        return false;
    }
    let scores: Vec<_> = v.vectors().iter().map(|x| dot(q, x)).collect();
    let e = pi.entries();
    if e.windows(2).any(|w| scores[w[0]] <= scores[w[1]]) {
        return false;
    }
    let last = &scores[e[e.len() - 1]];
    (0..v.n())
        .filter(|j| !e.contains(j))
        .all(|j| scores[j] < *last)
}

/// Sign pattern `delta_{i,j}` for every pair `i < j`: `+1` when `i` must rank
/// above `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwisePreference {
    n: usize,
    delta: Vec<i8>,
}

impl PairwisePreference {
    fn index(n: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < n);
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Pattern number `bits` of the `2^{C(n,2)}` possible ones; bit set means `+1`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        let m = n * (n - 1) / 2;
        let delta = (0..m)
            .map(|k| if bits >> k & 1 == 1 { 1 } else { -1 })
            .collect();
        Self { n, delta }
    }

    pub fn from_permutation(pi: &PartialPermutation) -> Result<Self> {
        let n = pi.k();
        let mut rank = vec![usize::MAX; n];
        for (pos, &item) in pi.entries().iter().enumerate() {
            if item >= n {
                return Err(Error::arg("preference needs a full permutation"));
            }
            rank[item] = pos;
        }
        let mut delta = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                delta.push(if rank[i] < rank[j] { 1 } else { -1 });
            }
        }
        Ok(Self { n, delta })
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        if i < j {
            self.delta[Self::index(self.n, i, j)]
        } else {
            -self.delta[Self::index(self.n, j, i)]
        }
    }

    /// Feasibility of `<q, v_i - v_j> * delta_{i,j} > 0` for all `i < j`.
    pub fn is_feasible(&self, v: &ItemVectorSet) -> Result<RepresentabilityWitness> {
        if v.n() != self.n {
            return Err(Error::arg("preference size does not match the vector set"));
        }
        let mut rows = Vec::with_capacity(self.delta.len());
        for i in 0..self.n {
            for j in i + 1..self.n {
                let diff = sub(v.vector(i), v.vector(j));
                rows.push(if self.get(i, j) > 0 {
                    diff
                } else {
                    diff.into_iter().map(|x| -x).collect()
                });
            }
        }
        lp_feasible(v.d(), &rows)
    }

    /// The total order the pattern induces, when it is transitive.
    pub fn to_permutation(&self) -> Option<PartialPermutation> {
        let mut wins: Vec<(usize, usize)> = (0..self.n)
            .map(|i| ((0..self.n).filter(|&j| j != i && self.get(i, j) > 0).count(), i))
            .collect();
        wins.sort_by(|a, b| b.0.cmp(&a.0));
        let order: Vec<usize> = wins.iter().map(|&(_, i)| i).collect();
        let pi = PartialPermutation::from_unchecked(order);
        (Self::from_permutation(&pi).ok()? == *self).then_some(pi)
    }
}
