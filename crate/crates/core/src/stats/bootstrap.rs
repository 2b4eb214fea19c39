//! Percentile bootstrap over paired observations.
//!
//! Every bootstrap task draws from its own ChaCha stream selected by
//! `(seed, stream)`, so tasks can run in any order or in parallel and still
//! produce identical intervals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::correlation::{correlation, CorrelationKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub level: f64,
    pub seed: u64,
    /// Redraw attempts allowed for one resample that has zero variance.
    pub max_redraws: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            resamples: 200,
            level: 0.95,
            seed: 0,
            max_redraws: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    pub ci_low: f64,
    pub ci_high: f64,
    /// Two-sided sign p-value: twice the smaller tail mass at zero.
    pub p_value: f64,
    pub degenerate_draws: usize,
    pub replicates: Vec<f64>,
}

pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stable 64-bit FNV-1a hash, used to derive per-task stream ids from keys.
pub fn stream_id(key: &str) -> u64 {
    key.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn bootstrap_correlation(
    x: &[f64],
    y: &[f64],
    kind: CorrelationKind,
    cfg: &BootstrapConfig,
    stream: u64,
) -> Result<BootstrapOutcome> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {n} vs {}",
            y.len()
        )));
    }
    if n < 3 {
        return Err(Error::InvalidInput(format!("bootstrap needs n >= 3, got {n}")));
    }
    if cfg.resamples == 0 || !(0.0..1.0).contains(&cfg.level) {
        return Err(Error::InvalidInput(
            "bootstrap needs resamples > 0 and level in (0, 1)".into(),
        ));
    }
    let mut rng = task_rng(cfg.seed, stream);
    let mut bx = vec![0.0; n];
    let mut by = vec![0.0; n];
    let mut replicates = Vec::with_capacity(cfg.resamples);
    let mut degenerate = 0;
    for _ in 0..cfg.resamples {
        let mut attempts = 0;
        loop {
            for i in 0..n {
                let k = rng.random_range(0..n);
                bx[i] = x[k];
                by[i] = y[k];
            }
            match correlation(kind, &bx, &by) {
                Ok(r) => {
                    replicates.push(r);
                    break;
                }
                Err(Error::UndefinedCorrelation(_)) => {
                    degenerate += 1;
                    attempts += 1;
                    if attempts > cfg.max_redraws || degenerate * 2 > cfg.resamples {
                        return Err(Error::Degenerate(format!(
                            "bootstrap: {degenerate} degenerate resamples (zero variance)"
                        )));
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    let mut sorted = replicates.clone();
    sorted.sort_by(f64::total_cmp);
    let alpha = 1.0 - cfg.level;
    let below = sorted.iter().filter(|&&r| r <= 0.0).count() as f64;
    let above = sorted.iter().filter(|&&r| r >= 0.0).count() as f64;
    let p_value = (2.0 * below.min(above) / sorted.len() as f64).min(1.0);
    Ok(BootstrapOutcome {
        ci_low: quantile_sorted(&sorted, alpha / 2.0),
        ci_high: quantile_sorted(&sorted, 1.0 - alpha / 2.0),
        p_value,
        degenerate_draws: degenerate,
        replicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64) -> BootstrapConfig {
        BootstrapConfig {
            seed,
            ..BootstrapConfig::default()
        }
    }

    #[test]
    fn identical_vectors_give_point_interval() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let out = bootstrap_correlation(&x, &x, CorrelationKind::Pearson, &cfg(1), 0).unwrap();
        assert!((out.ci_low - 1.0).abs() < 1e-12);
        assert!((out.ci_high - 1.0).abs() < 1e-12);
        assert_eq!(out.replicates.len(), 200);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let y: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64).collect();
        let a = bootstrap_correlation(&x, &y, CorrelationKind::Pearson, &cfg(9), 3).unwrap();
        let b = bootstrap_correlation(&x, &y, CorrelationKind::Pearson, &cfg(9), 3).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_correlation(&x, &y, CorrelationKind::Pearson, &cfg(9), 4).unwrap();
        assert_ne!(a.replicates, c.replicates);
    }

    #[test]
    fn degenerate_resamples_are_redrawn_and_counted() {
        // one outlier: resamples missing it have zero variance
        let mut x = vec![0.0; 4];
        x.push(1.0);
        let y: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let out = bootstrap_correlation(&x, &y, CorrelationKind::Pearson, &cfg(5), 0);
        match out {
            Ok(o) => {
                assert!(o.degenerate_draws > 0);
                assert_eq!(o.replicates.len(), 200);
            }
            Err(Error::Degenerate(_)) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn mostly_degenerate_data_errors() {
        // degenerate unless both outliers are drawn
        let mut x = vec![0.0; 60];
        x[0] = 1.0;
        let mut y = vec![0.0; 60];
        y[59] = 1.0;
        assert!(matches!(
            bootstrap_correlation(&x, &y, CorrelationKind::Pearson, &cfg(2), 0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn quantile_interpolates() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&s, 0.5), 3.0);
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert!((quantile_sorted(&s, 0.1) - 1.4).abs() < 1e-12);
    }

    #[test]
    fn stream_ids_are_stable() {
        assert_eq!(stream_id(""), 0xcbf2_9ce4_8422_2325);
        assert_ne!(stream_id("a"), stream_id("b"));
    }
}
