//! Small exact linear-algebra helpers (Gaussian elimination on rationals).

use num_traits::{One, Zero};

use crate::exact::{RVec, Rational};

/// Row-reduces in place; returns the pivot column of each pivot row.
fn row_reduce(m: &mut [RVec]) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for a in m[row].iter_mut() {
            *a *= &inv;
        }
        let pivot_row = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (a, p) in r.iter_mut().zip(&pivot_row) {
                *a -= &f * p;
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

pub(crate) fn rank(rows: &[RVec]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m).len()
}

/// A basis vector of the null space when it is exactly one-dimensional.
pub(crate) fn null_vector(rows: &[RVec]) -> Option<RVec> {
    let cols = rows.first()?.len();
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m);
    if pivots.len() + 1 != cols {
        return None;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut x = vec![Rational::zero(); cols];
    x[free] = Rational::one();
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = -m[r][free].clone();
    }
    Some(x)
}

/// No `d + 1` of the points lie on a common affine hyperplane.
pub(crate) fn general_position(points: &[RVec], d: usize) -> bool {
    let k = d + 1;
    if points.len() < k {
        return points.len() <= 1 || {
            let lifted: Vec<RVec> = points.iter().map(|p| lift(p)).collect();
            rank(&lifted) == points.len()
        };
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let lifted: Vec<RVec> = idx.iter().map(|&i| lift(&points[i])).collect();
        if rank(&lifted) < k {
            return false;
        }
        if !next_combination(&mut idx, points.len()) {
            return true;
        }
    }
}

fn lift(p: &[Rational]) -> RVec {
    let mut v = p.to_vec();
    v.push(Rational::one());
    v
}

/// Advances `idx` to the next k-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
        return false;
    };
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}
