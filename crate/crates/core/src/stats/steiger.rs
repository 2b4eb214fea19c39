//! Steiger's (1980) test for two dependent correlations sharing a variable.
//!
//! Compares `r_jk` against `r_jh` given the intercorrelation `r_kh` of the
//! two non-shared variables, using Fisher-transformed correlations and the
//! pooled-correlation estimate of their covariance.

use serde::{Deserialize, Serialize};

use super::normal_two_sided_p;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteigerResult {
    pub r_jk: f64,
    pub r_jh: f64,
    pub r_kh: f64,
    pub n: usize,
    pub z: f64,
    pub p_value: f64,
}

pub fn steiger_test(r_jk: f64, r_jh: f64, r_kh: f64, n: usize) -> Result<SteigerResult> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("Steiger test needs n >= 4, got {n}")));
    }
    for (name, r) in [("r_jk", r_jk), ("r_jh", r_jh)] {
        if !r.is_finite() || r.abs() >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "{name} = {r} has no finite Fisher transform"
            )));
        }
    }
    if !r_kh.is_finite() || r_kh.abs() > 1.0 {
        return Err(Error::InvalidInput(format!("r_kh = {r_kh} outside [-1, 1]")));
    }
    if r_jk == r_jh {
        return Ok(SteigerResult {
            r_jk,
            r_jh,
            r_kh,
            n,
            z: 0.0,
            p_value: 1.0,
        });
    }
    let mean = (r_jk + r_jh) / 2.0;
    let m2 = mean * mean;
    let c = (r_kh * (1.0 - 2.0 * m2) - 0.5 * m2 * (1.0 - 2.0 * m2 - r_kh * r_kh)) / (1.0 - m2).powi(2);
    let denom = 2.0 - 2.0 * c;
    if denom <= 0.0 {
        return Err(Error::Degenerate(format!(
            "Steiger test: non-positive variance term (c = {c})"
        )));
    }
    let z = (r_jk.atanh() - r_jh.atanh()) * ((n - 3) as f64).sqrt() / denom.sqrt();
    Ok(SteigerResult {
        r_jk,
        r_jh,
        r_kh,
        n,
        z,
        p_value: normal_two_sided_p(z),
    })
}
