use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::{Error, Result};

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `2 * sum_{i<d} C(C(n,2) - 1, i)`: the number of regions cut by `C(n,2)`
/// central hyperplanes in general position in `R^d`.
pub fn region_bound(n: u64, d: u64) -> Result<BigUint> {
    if n < 2 || d < 1 {
        return Err(Error::arg(format!("region bound needs n >= 2 and d >= 1 (got n = {n}, d = {d})")));
    }
    let m = n * (n - 1) / 2 - 1;
    let sum = (0..d).fold(BigUint::zero(), |acc, i| acc + binomial(m, i));
    Ok(sum * 2u32)
}

/// `n! / (n - k)!`, the number of K-permutations.
pub fn falling_factorial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    (n - k + 1..=n).fold(BigUint::one(), |acc, x| acc * x)
}

/// `n^{min(K, 2d)}`.
pub fn power_bound(n: u64, k: u64, d: u64) -> BigUint {
    num_traits::pow(BigUint::from(n), k.min(2 * d) as usize)
}

/// The upper bounds an enumerated count must respect.
#[derive(Debug, Clone, Serialize)]
pub struct BoundChecks {
    pub count: u64,
    pub falling_factorial: String,
    pub region_bound: String,
    pub power_bound: String,
    pub within_falling_factorial: bool,
    pub within_region_bound: bool,
    pub within_power_bound: bool,
}

impl BoundChecks {
    pub fn evaluate(count: u64, n: u64, k: u64, d: u64) -> Result<Self> {
        let c = BigUint::from(count);
        let ff = falling_factorial(n, k);
        let region = if n >= 2 { region_bound(n, d)? } else { BigUint::one() };
        let power = power_bound(n, k, d);
        Ok(Self {
            count,
            within_falling_factorial: c <= ff,
            within_region_bound: c <= region,
            within_power_bound: c <= power,
            falling_factorial: ff.to_string(),
            region_bound: region.to_string(),
            power_bound: power.to_string(),
        })
    }

    pub fn all_hold(&self) -> bool {
        self.within_falling_factorial && self.within_region_bound && self.within_power_bound
    }
}
