//! Monte Carlo calibration of the significance tests and the bootstrap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use readease_core::stats::{bootstrap_correlation, pearson, steiger_test, BootstrapConfig, CorrelationKind};

/// Z from the textbook formula, written out independently.
pub fn steiger_by_hand(r_jk: f64, r_jh: f64, r_kh: f64, n: f64) -> f64 {
    let fisher = |r: f64| 0.5 * ((1.0 + r) / (1.0 - r)).ln();
    let rbar = (r_jk + r_jh) / 2.0;
    let num = r_kh * (1.0 - 2.0 * rbar * rbar) - 0.5 * rbar * rbar * (1.0 - 2.0 * rbar * rbar - r_kh * r_kh);
    let c = num / ((1.0 - rbar * rbar) * (1.0 - rbar * rbar));
    (fisher(r_jk) - fisher(r_jh)) * (n - 3.0).sqrt() / (2.0 - 2.0 * c).sqrt()
}

/// Lower-triangular factor of a 3x3 correlation matrix.
fn cholesky3(r_jk: f64, r_jh: f64, r_kh: f64) -> [[f64; 3]; 3] {
    let a = [[1.0, r_jk, r_jh], [r_jk, 1.0, r_kh], [r_jh, r_kh, 1.0]];
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            l[i][j] = if i == j {
                (a[i][i] - s).sqrt()
            } else {
                (a[i][j] - s) / l[j][j]
            };
        }
    }
    l
}

/// Fraction of null samples rejected at `alpha`, with population
/// correlations r_jk = r_jh = `rho` and r_kh = `r_kh`.
#[allow(clippy::needless_range_loop)]
pub fn steiger_null_rejection(seed: u64, draws: usize, n: usize, rho: f64, r_kh: f64, alpha: f64) -> f64 {
    let l = cholesky3(rho, rho, r_kh);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0;
    for _ in 0..draws {
        let mut cols = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for t in 0..n {
            let z: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            for i in 0..3 {
                cols[i][t] = (0..=i).map(|k| l[i][k] * z[k]).sum();
            }
        }
        let [j, k, h] = &cols;
        let res = steiger_test(
            pearson(j, k).unwrap(),
            pearson(j, h).unwrap(),
            pearson(k, h).unwrap(),
            n,
        )
        .unwrap();
        if res.p_value < alpha {
            rejected += 1;
        }
    }
    rejected as f64 / draws as f64
}

/// Fraction of percentile bootstrap intervals that contain the true `rho`.
pub fn bootstrap_coverage(seed: u64, reps: usize, n: usize, rho: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = (1.0 - rho * rho).sqrt();
    let mut covered = 0;
    for rep in 0..reps {
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&xi| rho * xi + noise * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let cfg = BootstrapConfig {
            seed: seed.wrapping_add(rep as u64),
            ..BootstrapConfig::default()
        };
        let out = bootstrap_correlation(&x, &y, CorrelationKind::Pearson, &cfg, 0).unwrap();
        if out.ci_low <= rho && rho <= out.ci_high {
            covered += 1;
        }
    }
    covered as f64 / reps as f64
}
