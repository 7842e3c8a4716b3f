//! Ordinary least squares for a straight line.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// Half-widths of the 95% confidence intervals.
    pub intercept_ci: f64,
    pub slope_ci: f64,
    /// Root-mean-square residual.
    pub rms: f64,
    pub n: usize,
}

/// Fits `y = intercept + slope x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InsufficientSamples(format!("{} abscissae for {} ordinates", n, y.len())));
    }
    if n < 3 {
        return Err(Error::InsufficientSamples(format!("{n} points for a line fit")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("fit data".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientSamples("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let s2 = sse / (nf - 2.0);
    let se_slope = (s2 / sxx).sqrt();
    let se_intercept = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)
        .map_err(|e| Error::InvalidSpec(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(LineFit {
        intercept,
        slope,
        intercept_ci: t * se_intercept,
        slope_ci: t * se_slope,
        rms: (sse / nf).sqrt(),
        n,
    })
}
