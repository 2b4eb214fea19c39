use serde::{Deserialize, Serialize};

use super::descriptive::{mean, variance};
use super::t_two_sided_p;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Welch's unequal-variance two-sided t-test.
pub fn welch_ttest(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "t-test needs at least 2 values per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (ma, mb) = (mean(a).unwrap(), mean(b).unwrap());
    let (va, vb) = (variance(a).unwrap(), variance(b).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        return Err(Error::Degenerate("t-test: both groups have zero variance".into()));
    }
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let t = (ma - mb) / se2.sqrt();
    Ok(TTest {
        t,
        df,
        p_value: t_two_sided_p(t, df),
    })
}
