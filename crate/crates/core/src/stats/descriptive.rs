use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Unbiased sample variance.
pub(crate) fn variance(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    if values.len() < 2 {
        return None;
    }
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    Some(ss / (values.len() - 1) as f64)
}

/// Mean with the half-width of its t-based 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCi {
    pub mean: f64,
    pub half_width: f64,
    pub n: usize,
}

impl MeanCi {
    pub fn low(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn high(&self) -> f64 {
        self.mean + self.half_width
    }
}

pub fn mean_ci(values: &[f64], level: f64) -> Result<MeanCi> {
    if values.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "confidence interval needs at least 2 values, got {}",
            values.len()
        )));
    }
    let n = values.len();
    let m = mean(values).expect("non-empty");
    let sd = variance(values).expect("n >= 2").sqrt();
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .map_err(|e| Error::InvalidInput(e.to_string()))?
        .inverse_cdf(0.5 + level / 2.0);
    Ok(MeanCi {
        mean: m,
        half_width: t * sd / (n as f64).sqrt(),
        n,
    })
}
