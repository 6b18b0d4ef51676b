use rayon::prelude::*;
use serde::Serialize;

use super::{is_representable, ItemVectorSet, PairwisePreference, PartialPermutation};
use crate::{Error, Result};

/// Upper limit on the number of candidate permutations an exhaustive
/// enumeration may test. The default admits all of `S_8` and every
/// `K <= 4` list over twelve items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationGuard {
    pub max_candidates: u64,
}

impl Default for EnumerationGuard {
    fn default() -> Self {
        Self {
            max_candidates: 40_320,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationResult {
    pub k: usize,
    pub count: u64,
    pub permutations: Vec<PartialPermutation>,
}

/// All K-permutations of `0..n` in lexicographic order.
pub fn k_permutations(n: usize, k: usize) -> Vec<PartialPermutation> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<PartialPermutation>) {
        if cur.len() == k {
            out.push(PartialPermutation::from_unchecked(cur.clone()));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, k, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, &mut Vec::with_capacity(k), &mut vec![false; n], &mut out);
    }
    out
}

/// Tests every K-permutation for representability and counts the survivors
/// (`nrank_K`). Candidates are checked in parallel; the returned list keeps
/// lexicographic order.
pub fn enumerate_representable(
    v: &ItemVectorSet,
    k: usize,
    guard: EnumerationGuard,
) -> Result<EnumerationResult> {
    let n = v.n();
    if k == 0 || k > n {
        return Err(Error::arg(format!("K = {k} must be in 1..={n}")));
    }
    let candidates = super::falling_factorial(n as u64, k as u64);
    if candidates > guard.max_candidates.into() {
        return Err(Error::Size(format!(
            "{candidates} candidate {k}-permutations of {n} items exceed the limit of {}",
            guard.max_candidates
        )));
    }
    let flags: Vec<Result<bool>> = k_permutations(n, k)
        .into_par_iter()
        .map(|pi| is_representable(v, &pi).map(|w| w.feasible))
        .collect();
    let mut permutations = Vec::new();
    for (pi, ok) in k_permutations(n, k).into_iter().zip(flags) {
        if ok? {
            permutations.push(pi);
        }
    }
    Ok(EnumerationResult {
        k,
        count: permutations.len() as u64,
        permutations,
    })
}

/// Counts sign patterns `delta` whose strict system is feasible. This is the
/// number of regions cut out by the `C(n,2)` central hyperplanes, and equals
/// `nrank_n` by a route independent of permutation enumeration.
pub fn count_feasible_preferences(v: &ItemVectorSet, guard: EnumerationGuard) -> Result<u64> {
    let n = v.n();
    let m = n * (n - 1) / 2;
    if m >= 63 || (1u64 << m) > guard.max_candidates {
        return Err(Error::Size(format!("2^{m} sign patterns exceed the limit")));
    }
    let hits: Result<Vec<bool>> = (0..1u64 << m)
        .into_par_iter()
        .map(|bits| PairwisePreference::from_bits(n, bits).is_feasible(v).map(|w| w.feasible))
        .collect();
    Ok(hits?.into_iter().filter(|&b| b).count() as u64)
}
