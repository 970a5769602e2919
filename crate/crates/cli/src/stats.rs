//! Order statistics, bootstrap intervals, and log-log exponent fits.

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Median of an unsorted slice; averages the middle pair on even length.
pub fn median(values: &[u64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut v = values.to_vec();
    v.sort_unstable();
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] + v[mid]) as f64 / 2.0
    }
}

/// Nearest-rank quantile, q in (0, 1].
pub fn quantile(values: &[u64], q: f64) -> u64 {
    assert!(!values.is_empty(), "quantile of empty slice");
    assert!(q > 0.0 && q <= 1.0);
    let mut v = values.to_vec();
    v.sort_unstable();
    let rank = (q * v.len() as f64).ceil() as usize;
    v[rank.clamp(1, v.len()) - 1]
}

pub fn mean(values: &[u64]) -> f64 {
    assert!(!values.is_empty(), "mean of empty slice");
    values.iter().sum::<u64>() as f64 / values.len() as f64
}

/// Bootstrap confidence interval for the median: `iters` resamples with
/// replacement, central `level` mass of the resampled medians.
pub fn bootstrap_median_ci(values: &[u64], level: f64, iters: usize, seed: u64) -> (f64, f64) {
    assert!(!values.is_empty());
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut medians = Vec::with_capacity(iters);
    let mut sample = vec![0u64; values.len()];
    for _ in 0..iters {
        for slot in sample.iter_mut() {
            *slot = values[rng.gen_range(0..values.len())];
        }
        medians.push(median(&sample));
    }
    medians.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tail = (1.0 - level) / 2.0;
    let lo = ((tail * iters as f64) as usize).min(iters - 1);
    let hi = (((1.0 - tail) * iters as f64) as usize).min(iters - 1);
    (medians[lo], medians[hi])
}

/// Least-squares slope of ln(y) against ln(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub exponent: f64,
    pub stderr: f64,
    pub residual_rms: f64,
    pub cells: usize,
}

pub fn loglog_fit(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 3 {
        bail!("log-log fit needs at least 3 cells, got {}", points.len());
    }
    for &(x, y) in points {
        if x <= 0.0 || y <= 0.0 {
            bail!("log-log fit needs positive coordinates, got ({x}, {y})");
        }
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        bail!("log-log fit needs at least two distinct x values");
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = (points.len() - 2).max(1) as f64;
    Ok(LogLogFit {
        exponent: slope,
        stderr: (rss / dof / sxx).sqrt(),
        residual_rms: (rss / points.len() as f64).sqrt(),
        cells: points.len(),
    })
}
