#![allow(dead_code)]

use dotrank::exact::{dot, int, ratio, Constraint, LinearProgram, LpOutcome, RVec, Rational, Relation};
use dotrank::popcone::{query_set_witness, ConeProblem};
use dotrank::rankgeom::{ItemVectorSet, PartialPermutation};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_int_vectors(rng: &mut ChaCha8Rng, n: usize, d: usize, range: i64) -> Vec<Vec<i64>> {
    (0..n).map(|_| (0..d).map(|_| rng.random_range(-range..=range)).collect()).collect()
}

/// Redraws until the vectors are distinct, in general position, and every
/// pair difference defines its own hyperplane.
pub fn random_generic(rng: &mut ChaCha8Rng, n: usize, d: usize, range: i64) -> ItemVectorSet {
    loop {
        let rows = random_int_vectors(rng, n, d, range);
        if let Ok(v) = ItemVectorSet::from_ints(&rows) {
            if v.is_general_position() && v.arrangement_hyperplanes_distinct() {
                return v;
            }
        }
    }
}

/// Facets of the cyclic polytope by Gale's evenness condition: a d-subset S
/// is a facet iff every pair of non-members has an even number of members
/// between them.
pub fn gale_oracle(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != d {
            continue;
        }
        let inside = |i: usize| mask & (1 << i) != 0;
        let outside: Vec<usize> = (0..n).filter(|&i| !inside(i)).collect();
        let even = outside
            .iter()
            .enumerate()
            .all(|(a, &i)| outside[a + 1..].iter().all(|&j| (i + 1..j).filter(|&k| inside(k)).count() % 2 == 0));
        if even {
            out.push((0..n).filter(|&i| inside(i)).collect());
        }
    }
    out.sort();
    out
}

/// Items that are not convex combinations of the other items.
pub fn hull_vertices(v: &ItemVectorSet) -> Vec<usize> {
    (0..v.n())
        .filter(|&i| {
            let others: Vec<usize> = (0..v.n()).filter(|&j| j != i).collect();
            let mut lp = LinearProgram::new(others.len());
            for r in 0..v.d() {
                let row = others.iter().map(|&j| v.vector(j)[r].clone()).collect();
                lp.add(Constraint::new(row, Relation::Eq, v.vector(i)[r].clone()));
            }
            lp.add(Constraint::new(vec![Rational::one(); others.len()], Relation::Eq, Rational::one()));
            matches!(lp.solve(), LpOutcome::Infeasible)
        })
        .collect()
}

/// The top-k list induced by `q`, or `None` if a tie decides membership or order.
pub fn ranking_by_scores(v: &ItemVectorSet, q: &[Rational], k: usize) -> Option<PartialPermutation> {
    let mut scored: Vec<(Rational, usize)> = v.vectors().iter().map(|x| dot(q, x)).zip(0..).collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0));
    let limit = (k + 1).min(v.n());
    if scored[..limit].windows(2).any(|w| w[0].0 == w[1].0) {
        return None;
    }
    PartialPermutation::new(scored[..k].iter().map(|s| s.1).collect(), v.n()).ok()
}

pub fn random_rational(rng: &mut ChaCha8Rng, range: i64) -> Rational {
    ratio(rng.random_range(-range * 4..=range * 4), rng.random_range(1..=4))
}

pub fn random_rvec(rng: &mut ChaCha8Rng, d: usize, range: i64) -> RVec {
    (0..d).map(|_| random_rational(rng, range)).collect()
}

/// A cone problem whose query set has a strictly feasible point. Popular
/// vectors are shifted along a random direction so that most draws separate.
pub fn random_cone_problem(rng: &mut ChaCha8Rng, d: usize, max_p: usize, max_l: usize) -> ConeProblem {
    loop {
        let np = rng.random_range(1..=max_p);
        let nl = rng.random_range(1..=max_l);
        let dir: RVec = (0..d).map(|_| int(rng.random_range(-3..=3))).collect();
        let popular: Vec<RVec> = (0..np)
            .map(|_| random_rvec(rng, d, 5).iter().zip(&dir).map(|(x, s)| x + s * int(4)).collect())
            .collect();
        let long_tail: Vec<RVec> = (0..nl).map(|_| random_rvec(rng, d, 5)).collect();
        let prob = ConeProblem::new(popular, long_tail).expect("well-formed");
        if query_set_witness(&prob).expect("lp").feasible {
            return prob;
        }
    }
}

/// Non-negative weights that sum to one.
pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> RVec {
    let raw: Vec<i64> = (0..n).map(|_| rng.random_range(0..=8)).collect();
    let total: i64 = raw.iter().sum();
    if total == 0 {
        let mut w = vec![Rational::zero(); n];
        w[rng.random_range(0..n)] = Rational::one();
        return w;
    }
    raw.iter().map(|&x| ratio(x, total)).collect()
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> RVec {
    (0..n).map(|_| ratio(rng.random_range(0..=12), rng.random_range(1..=4))).collect()
}

pub fn axpy(acc: &mut [Rational], w: &Rational, x: &[Rational]) {
    for (a, xi) in acc.iter_mut().zip(x) {
        *a += w * xi;
    }
}

/// A point of `conv(P) + cone{p_i - l_j}` built from a random certificate.
pub fn random_multi_member(rng: &mut ChaCha8Rng, prob: &ConeProblem) -> RVec {
    let mut s = vec![Rational::zero(); prob.d()];
    for (p, w) in prob.popular().iter().zip(random_simplex(rng, prob.popular().len())) {
        axpy(&mut s, &w, p);
    }
    for p in prob.popular() {
        for l in prob.long_tail() {
            let w = random_weights(rng, 1).remove(0);
            let gap = dotrank::exact::sub(p, l);
            axpy(&mut s, &w, &gap);
        }
    }
    s
}

/// A point of `l + cone{p_i - l}`.
pub fn random_singleton_member(rng: &mut ChaCha8Rng, popular: &[RVec], l: &[Rational]) -> RVec {
    let mut s = l.to_vec();
    for (p, w) in popular.iter().zip(random_weights(rng, popular.len())) {
        axpy(&mut s, &w, &dotrank::exact::sub(p, l));
    }
    s
}
