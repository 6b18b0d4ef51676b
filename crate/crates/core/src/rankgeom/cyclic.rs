use crate::exact::{RVec, Rational};
use crate::{Error, Result};

use super::ItemVectorSet;

/// `(t, t^2, ..., t^d)`.
pub fn moment_curve(t: &Rational, d: usize) -> RVec {
    let mut out = Vec::with_capacity(d);
    let mut p = t.clone();
    for _ in 0..d {
        out.push(p.clone());
        p *= t;
    }
    out
}

/// Points of the moment curve at the given parameters; their hull is the
/// cyclic polytope `C(n, d)`.
pub fn cyclic_polytope(n: usize, d: usize, t: &[Rational]) -> Result<ItemVectorSet> {
    if t.len() != n {
        return Err(Error::arg(format!("expected {n} parameters, got {}", t.len())));
    }
    if d == 0 {
        return Err(Error::arg("dimension must be at least 1"));
    }
    let mut sorted = t.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::arg("moment-curve parameters must be distinct"));
    }
    ItemVectorSet::new(t.iter().map(|ti| moment_curve(ti, d)).collect())
}

/// Facets of the cyclic polytope on parameters `t` by Gale's evenness
/// condition: a `d`-subset is a facet when every two items outside it are
/// separated, in parameter order, by an even number of items inside it.
/// Indices refer to `t`; each facet is sorted ascending and the list is sorted.
pub fn gale_facets(t: &[Rational], d: usize) -> Vec<Vec<usize>> {
    let n = t.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| t[a].cmp(&t[b]));
    let mut out = Vec::new();
    if d == 0 || d > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let mut inside = vec![false; n];
        idx.iter().for_each(|&i| inside[i] = true);
        let mut parity_ok = true;
        let mut between = None::<usize>;
        for &member in &inside {
            if member {
                if let Some(c) = between.as_mut() {
                    *c += 1;
                }
            } else {
                if between.is_some_and(|c| c % 2 == 1) {
                    parity_ok = false;
                    break;
                }
                between = Some(0);
            }
        }
        if parity_ok {
            let mut facet: Vec<usize> = idx.iter().map(|&i| order[i]).collect();
            facet.sort_unstable();
            out.push(facet);
        }
        if !super::linalg::next_combination(&mut idx, n) {
            break;
        }
    }
    out.sort();
    out
}
