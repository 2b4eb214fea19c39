use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::t_two_sided_p;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    Pearson,
    Spearman,
}

impl fmt::Display for CorrelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationKind::Pearson => "pearson",
            CorrelationKind::Spearman => "spearman",
        })
    }
}

impl FromStr for CorrelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" | "r" => Ok(CorrelationKind::Pearson),
            "spearman" | "rho" => Ok(CorrelationKind::Spearman),
            other => Err(Error::Config(format!("unknown correlation `{other}`"))),
        }
    }
}

pub fn correlation(kind: CorrelationKind, x: &[f64], y: &[f64]) -> Result<f64> {
    match kind {
        CorrelationKind::Pearson => pearson(x, y),
        CorrelationKind::Spearman => spearman(x, y),
    }
}

fn check_inputs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "correlation needs at least 3 observations, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value".into()));
    }
    Ok(())
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}

/// Product-moment correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_inputs(x, y)?;
    if is_constant(x) || is_constant(y) {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Ranks starting at 1; ties share their mean rank.
pub(crate) fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Rank correlation: Pearson on mid-ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_inputs(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Two-sided p-value for H0: no correlation, from
/// `t = r * sqrt((n - 2) / (1 - r^2))` with `n - 2` degrees of freedom.
pub fn correlation_pvalue(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("p-value needs n >= 3, got {n}")));
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidInput(format!("correlation {r} outside [-1, 1]")));
    }
    let df = (n - 2) as f64;
    if r.abs() == 1.0 {
        return Ok(0.0);
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    Ok(t_two_sided_p(t, df))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
        // cov = 0.5, var = 1, 1 -> r = 0.5
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pearson_zero_variance() {
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
    }

    #[test]
    fn pearson_requires_three() {
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.powi(3) + 7.0).collect();
        assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(spearman(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn pvalue_examples() {
        assert_eq!(correlation_pvalue(0.0, 50).unwrap(), 1.0);
        // t = 0.5 * sqrt(160 / 0.75) = 7.3030; two-sided p is ~1e-11
        let t = 0.5 * (160.0f64 / 0.75).sqrt();
        assert!((t - 7.30297).abs() < 1e-4);
        let p = correlation_pvalue(0.5, 162).unwrap();
        assert!(p > 0.0 && p < 1e-10, "p = {p}");
        assert!(correlation_pvalue(0.999999, 3).unwrap() < 0.01);
        // r = 0.3, n = 30: t = 1.6641, df = 28 -> p = 0.107246 (scipy)
        assert!((correlation_pvalue(0.3, 30).unwrap() - 0.107246).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn pearson_affine_invariance(
            xs in prop::collection::vec(-100.0f64..100.0, 5..30),
            noise in prop::collection::vec(-10.0f64..10.0, 30),
            a in 0.1f64..10.0, b in -50.0f64..50.0,
        ) {
            let ys: Vec<f64> = xs.iter().zip(&noise).map(|(x, e)| x * 0.5 + e).collect();
            if let Ok(r) = pearson(&xs, &ys) {
                let scaled: Vec<f64> = ys.iter().map(|v| a * v + b).collect();
                let neg: Vec<f64> = ys.iter().map(|v| -v).collect();
                prop_assert!((pearson(&xs, &scaled).unwrap() - r).abs() < 1e-9);
                prop_assert!((pearson(&xs, &neg).unwrap() + r).abs() < 1e-9);
            }
        }

        #[test]
        fn spearman_monotone_invariance(
            xs in prop::collection::vec(-5.0f64..5.0, 5..30),
            ys in prop::collection::vec(-5.0f64..5.0, 30),
        ) {
            let ys = &ys[..xs.len()];
            if let Ok(rho) = spearman(&xs, ys) {
                let tx: Vec<f64> = xs.iter().map(|v| v.exp()).collect();
                let ty: Vec<f64> = ys.iter().map(|v| v * v * v + 2.0 * v).collect();
                prop_assert!((spearman(&tx, &ty).unwrap() - rho).abs() < 1e-9);
            }
        }
    }
}
