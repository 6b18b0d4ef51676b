use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::linalg::{next_combination, null_vector};
use super::{ItemVectorSet, PartialPermutation, RepresentabilityWitness};
use crate::exact::{dot, int, serde_rational, RVec, Rational};
use crate::{Error, Result};

/// A facet of the convex hull: `<a, v_i> = b` on its `d` vertices and
/// `<a, v_j> < b` for every other item.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Facet {
    pub vertex_indices: Vec<usize>,
    #[serde(serialize_with = "serde_rational::ser_vec")]
    pub outward_normal: RVec,
    #[serde(serialize_with = "crate::rankgeom::facets::ser_one")]
    pub offset: Rational,
}

pub(crate) fn ser_one<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::exact::rational_to_string(r))
}

/// Brute force over all d-subsets: the hyperplane through each affinely
/// independent subset is kept when every other item lies strictly below it.
pub fn facets(v: &ItemVectorSet) -> Result<Vec<Facet>> {
    let (n, d) = (v.n(), v.d());
    if n < d + 1 {
        return Err(Error::arg(format!("need at least d + 1 = {} vectors, got {n}", d + 1)));
    }
    if !v.is_general_position() {
        return Err(Error::GeneralPosition(format!(
            "some {} of the {n} vectors lie on a common hyperplane",
            d + 1
        )));
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        // Rows (v_i, -1) so that the null vector is (a, b) with <a, v_i> = b.
        let rows: Vec<RVec> = idx
            .iter()
            .map(|&i| {
                let mut r = v.vector(i).to_vec();
                r.push(-Rational::one());
                r
            })
            .collect();
        if let Some(mut ab) = null_vector(&rows) {
            let b = ab.pop().expect("offset coordinate");
            let mut a = ab;
            let mut b = b;
            let mut above = 0usize;
            let mut below = 0usize;
            for j in (0..n).filter(|j| !idx.contains(j)) {
                let s = dot(&a, v.vector(j)) - &b;
                if s.is_positive() {
                    above += 1;
                } else if s.is_negative() {
                    below += 1;
                } else {
                    return Err(Error::GeneralPosition(format!(
                        "item {j} lies on the hyperplane through {idx:?}"
                    )));
                }
            }
            if above == 0 || below == 0 {
                if below == 0 {
                    a = a.into_iter().map(|x| -x).collect();
                    b = -b;
                }
                out.push(Facet {
                    vertex_indices: idx.clone(),
                    outward_normal: a,
                    offset: b,
                });
            }
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    Ok(out)
}

/// Turns a facet into a representable d-permutation of its vertices.
///
/// The facet normal alone ties every vertex of the facet, so it is nudged by
/// `eps * t` where `t = (1, k, k^2, ...)` separates the facet's vertices and
/// `eps = gap / (2 T + 2)`, with `gap` the score margin between the facet and
/// the best non-facet item and `T` the largest `|<t, v>|`. This keeps facet
/// items above the rest while ordering them strictly.
pub fn facet_permutation(v: &ItemVectorSet, f: &Facet) -> Result<(PartialPermutation, RepresentabilityWitness)> {
    let d = v.d();
    let on = &f.vertex_indices;
    if on.len() != d || on.iter().any(|&i| i >= v.n()) {
        return Err(Error::arg("facet does not match the vector set"));
    }
    let rest: Vec<usize> = (0..v.n()).filter(|j| !on.contains(j)).collect();
    let best_rest = rest
        .iter()
        .map(|&j| dot(&f.outward_normal, v.vector(j)))
        .max()
        .ok_or_else(|| Error::arg("facet covers every item"))?;
    let gap = &f.offset - &best_rest;
    if !gap.is_positive() || on.iter().any(|&i| dot(&f.outward_normal, v.vector(i)) != f.offset) {
        return Err(Error::arg("not a facet of the vector set"));
    }

    let mut base = 1i64;
    let tie_breaker = loop {
        let t: RVec = (0..d as u32).map(|p| int(base.pow(p))).collect();
        let mut s: Vec<Rational> = on.iter().map(|&i| dot(&t, v.vector(i))).collect();
        s.sort();
        if s.windows(2).all(|w| w[0] != w[1]) {
            break t;
        }
        base += 1;
    };
    let spread = v
        .vectors()
        .iter()
        .map(|x| dot(&tie_breaker, x).abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let eps = gap / (spread * int(2) + int(2));
    let q: RVec = f
        .outward_normal
        .iter()
        .zip(&tie_breaker)
        .map(|(a, t)| a + &eps * t)
        .collect();

    let mut order = on.clone();
    order.sort_by_key(|&i| std::cmp::Reverse(dot(&q, v.vector(i))));
    Ok((PartialPermutation::from_unchecked(order), RepresentabilityWitness::witness(q)))
}
