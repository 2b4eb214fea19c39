use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::t_two_sided_p;
use crate::error::{Error, Result};

/// Ordinary least-squares line with a two-sided test on the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub t: f64,
    pub p_value: f64,
    pub slope_ci_low: f64,
    pub slope_ci_high: f64,
    pub n: usize,
}

/// Fits `r ~ x` over `(x, r)` points, where x is typically log perplexity.
pub fn fit_r_vs_perplexity(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("regression needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate(
            "regression: predictor has zero variance".into(),
        ));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let df = nf - 2.0;
    let slope_se = (rss / df / sxx).sqrt();
    let t = if slope_se == 0.0 {
        if slope == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(slope)
        }
    } else {
        slope / slope_se
    };
    let tcrit = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidInput(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(LinearFit {
        slope,
        intercept,
        slope_se,
        t,
        p_value: if t == 0.0 { 1.0 } else { t_two_sided_p(t, df) },
        slope_ci_low: slope - tcrit * slope_se,
        slope_ci_high: slope + tcrit * slope_se,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points() {
        let fit = fit_r_vs_perplexity(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap();
        assert_eq!(fit.slope, 1.0);
        assert_eq!(fit.p_value, 0.0);
        assert_eq!(fit.slope_ci_low, 1.0);
    }

    #[test]
    fn reference_fit() {
        // scipy.stats.linregress([1,2,3,4,5],[2,1,4,3,5]):
        // slope 0.8, intercept 0.6, stderr 0.346410, p 0.104088
        let pts = [(1.0, 2.0), (2.0, 1.0), (3.0, 4.0), (4.0, 3.0), (5.0, 5.0)];
        let fit = fit_r_vs_perplexity(&pts).unwrap();
        assert!((fit.slope - 0.8).abs() < 1e-12);
        assert!((fit.intercept - 0.6).abs() < 1e-12);
        assert!((fit.slope_se - 0.346410).abs() < 1e-5);
        assert!((fit.p_value - 0.104088).abs() < 1e-5);
        assert!(fit.slope_ci_low < fit.slope && fit.slope < fit.slope_ci_high);
    }

    #[test]
    fn constant_predictor_errors() {
        assert!(fit_r_vs_perplexity(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
    }
}
