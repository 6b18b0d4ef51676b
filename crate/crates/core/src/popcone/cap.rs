use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::regularized_incomplete_beta;
use crate::{Error, Result};

/// Fraction of the unit sphere in `R^d` within angle `theta` of a fixed axis:
/// `I_{sin^2 theta}((d - 1) / 2, 1 / 2) / 2`.
pub fn spherical_cap_ratio(theta: f64, d: usize) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::arg(format!("cap angle {theta} outside [0, pi/2]")));
    }
    if d < 2 {
        return Err(Error::arg(format!("cap ratio needs d >= 2, got {d}")));
    }
    let s = theta.sin();
    Ok(0.5 * regularized_incomplete_beta(s * s, (d as f64 - 1.0) / 2.0, 0.5)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapRow {
    pub d: usize,
    pub ratio: f64,
    /// `ratio * sqrt(d - 1) / sin(theta)^(d - 1)`; settles to a constant as
    /// `d` grows.
    pub normalized: f64,
}

pub fn cap_decay_profile(theta: f64, dims: &[usize]) -> Result<Vec<CapRow>> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(Error::arg(format!("cap angle {theta} outside (0, pi/2]")));
    }
    dims.iter()
        .map(|&d| {
            let ratio = spherical_cap_ratio(theta, d)?;
            let dm1 = d as f64 - 1.0;
            Ok(CapRow {
                d,
                ratio,
                normalized: ratio * dm1.sqrt() / theta.sin().powf(dm1),
            })
        })
        .collect()
}
