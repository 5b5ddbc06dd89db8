//! Small estimation helpers shared by the Monte Carlo diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    /// `|mean - target| / stderr`; infinite when the error bar is zero and the
    /// target is missed.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) <= sigmas
    }
}

/// Mean and standard error of independent samples.
pub fn mean_estimate(xs: &[f64]) -> Result<Estimate> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 samples, have {}", xs.len())));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok(Estimate { mean, stderr: (var / n).sqrt(), n: xs.len() })
}

/// Batch-means estimate for a correlated stationary sequence: the mean of
/// `batches` consecutive block averages and their standard error.
pub fn batch_means(xs: &[f64], batches: usize) -> Result<Estimate> {
    if batches < 2 || xs.len() < 2 * batches {
        return Err(Error::InsufficientData(format!(
            "{} samples cannot form {batches} batches",
            xs.len()
        )));
    }
    let size = xs.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let mut e = mean_estimate(&means)?;
    e.n = size * batches;
    Ok(e)
}

/// Least-squares line `y ≈ slope x + intercept`.
pub fn ls_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    ls_fit(xs, ys).0
}

/// Weighted least-squares slope with standard error, weights `1/σ²`.
pub fn weighted_slope(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> (f64, f64) {
    let w: Vec<f64> = sigmas.iter().map(|s| 1.0 / (s * s).max(1e-300)).collect();
    let sw: f64 = w.iter().sum();
    let mx = xs.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(&w).map(|(x, w)| w * (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).zip(&w).map(|((x, y), w)| w * (x - mx) * (y - my)).sum();
    (sxy / sxx, (1.0 / sxx).sqrt())
}
