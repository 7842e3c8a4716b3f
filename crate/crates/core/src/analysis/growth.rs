//! Exponential and double-exponential fits of `sup |grad omega|`.

use serde::{Deserialize, Serialize};

use crate::analysis::fit::{fit_line, LineFit};
use crate::error::{Error, Result};
use crate::report::{FitModel, FitParam, FitResult, GrowthReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponential: FitResult,
    /// Absent when `G <= epsilon` somewhere in the window.
    pub double_exponential: Option<FitResult>,
    /// Slope of `log G`.
    pub rate: f64,
    /// `rate >= 0.9 epsilon`.
    pub meets_exponential_bound: bool,
}

fn param(name: &str, value: f64, half: f64) -> FitParam {
    FitParam { name: name.into(), value, lo: value - half, hi: value + half }
}

fn as_result(model: FitModel, f: &LineFit, params: Vec<FitParam>, window: (f64, f64)) -> FitResult {
    FitResult { model, params, residual_norm: f.rms, window }
}

/// Fits `log G = log c + r t` and `log log (G / epsilon) = log c1 + c2 epsilon t`
/// on samples with `t` in `window` (all samples when `None`).
pub fn growth_fit(report: &GrowthReport, epsilon: f64, window: Option<(f64, f64)>) -> Result<GrowthFit> {
    if !(epsilon > 0.0) {
        return Err(Error::NonpositiveInput(format!("epsilon = {epsilon}")));
    }
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let picked: Vec<(f64, f64)> = report
        .samples
        .iter()
        .filter(|s| s.t >= lo && s.t <= hi)
        .map(|s| (s.t, s.grad_sup))
        .collect();
    if picked.len() < 10 {
        return Err(Error::InsufficientSamples(format!("{} samples in the fit window", picked.len())));
    }
    if let Some((t, g)) = picked.iter().find(|(_, g)| !(*g > 0.0)) {
        return Err(Error::NonPositiveNorm(format!("sup |grad omega| = {g} at t = {t}")));
    }
    let used = (picked[0].0, picked[picked.len() - 1].0);
    let t: Vec<f64> = picked.iter().map(|p| p.0).collect();
    let lg: Vec<f64> = picked.iter().map(|p| p.1.ln()).collect();
    let e = fit_line(&t, &lg)?;
    let exponential = as_result(
        FitModel::Exponential,
        &e,
        vec![param("rate", e.slope, e.slope_ci), param("log_prefactor", e.intercept, e.intercept_ci)],
        used,
    );
    let double_exponential = if picked.iter().all(|(_, g)| *g > epsilon) {
        let llg: Vec<f64> = picked.iter().map(|(_, g)| (g / epsilon).ln().ln()).collect();
        let d = fit_line(&t, &llg)?;
        Some(as_result(
            FitModel::DoubleExponential,
            &d,
            vec![
                param("c1", d.intercept.exp(), d.intercept.exp() * d.intercept_ci),
                param("c2", d.slope / epsilon, d.slope_ci / epsilon),
                param("inner_rate", d.slope, d.slope_ci),
            ],
            used,
        ))
    } else {
        None
    };
    Ok(GrowthFit {
        rate: e.slope,
        meets_exponential_bound: e.slope >= 0.9 * epsilon,
        exponential,
        double_exponential,
    })
}
