//! Statistical machinery for the evaluation: correlations and their
//! p-values, percentile bootstrap, Steiger's dependent-correlation test,
//! Welch's t-test and a simple least-squares slope test.

pub mod bootstrap;
pub mod correlation;
pub mod descriptive;
pub mod regression;
pub mod steiger;
pub mod ttest;

use serde::{Deserialize, Serialize};

pub use bootstrap::{bootstrap_correlation, BootstrapConfig, BootstrapOutcome};
pub use correlation::{correlation, correlation_pvalue, pearson, spearman, CorrelationKind};
pub use descriptive::{mean, mean_ci, MeanCi};
pub use regression::{fit_r_vs_perplexity, LinearFit};
pub use steiger::{steiger_test, SteigerResult};
pub use ttest::{welch_ttest, TTest};

/// Significance class used to color results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tier {
    #[serde(rename = "p<0.001")]
    P001,
    #[serde(rename = "p<0.01")]
    P01,
    #[serde(rename = "p<0.05")]
    P05,
    #[serde(rename = "ns")]
    NotSignificant,
}

impl Tier {
    pub fn from_p(p: f64) -> Tier {
        if p < 0.001 {
            Tier::P001
        } else if p < 0.01 {
            Tier::P01
        } else if p < 0.05 {
            Tier::P05
        } else {
            Tier::NotSignificant
        }
    }

    pub fn stars(self) -> &'static str {
        match self {
            Tier::P001 => "***",
            Tier::P01 => "**",
            Tier::P05 => "*",
            Tier::NotSignificant => "ns",
        }
    }
}

/// Two-sided p-value of a standard normal statistic.
pub(crate) fn normal_two_sided_p(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Two-sided p-value of a Student t statistic with `df` degrees of freedom,
/// via the regularized incomplete beta function (no 1 - cdf cancellation).
pub(crate) fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    statrs::function::beta::beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiers() {
        assert_eq!(Tier::from_p(0.0005), Tier::P001);
        assert_eq!(Tier::from_p(0.001), Tier::P01);
        assert_eq!(Tier::from_p(0.049), Tier::P05);
        assert_eq!(Tier::from_p(0.05), Tier::NotSignificant);
        assert_eq!(Tier::P01.stars(), "**");
    }

    #[test]
    fn normal_p_reference_values() {
        assert!((normal_two_sided_p(1.959964) - 0.05).abs() < 1e-6);
        assert!((normal_two_sided_p(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn t_p_reference_values() {
        // t(10) two-sided critical value at 0.05 is 2.228139
        assert!((t_two_sided_p(2.228139, 10.0) - 0.05).abs() < 1e-6);
        // t(1) is Cauchy: P(|T| > 1) = 0.5
        assert!((t_two_sided_p(1.0, 1.0) - 0.5).abs() < 1e-12);
        assert_eq!(t_two_sided_p(0.0, 5.0), 1.0);
        assert_eq!(t_two_sided_p(f64::INFINITY, 5.0), 0.0);
    }
}
