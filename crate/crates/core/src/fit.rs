//! Ordinary least squares in log10-log10 coordinates.

use crate::error::{invalid, Result};

/// Straight-line fit `log10 y = slope * log10 x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log10 units.
    pub rms: f64,
    pub n: usize,
}

impl SlopeFit {
    pub fn predict(&self, x: f64) -> f64 {
        10f64.powf(self.slope * x.log10() + self.intercept)
    }
}

pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if x.len() != y.len() {
        return Err(invalid("fit_loglog: x and y lengths differ"));
    }
    if x.len() < 2 {
        return Err(invalid("fit_loglog needs at least two samples"));
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(invalid("fit_loglog needs positive finite data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log10()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("fit_loglog: x values are all equal"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    Ok(SlopeFit { slope, intercept, rms: (rss / n).sqrt(), n: lx.len() })
}
