//! Differential inequality for `L = log(b/a)` and the bracket-rectangle constant.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::fit::fit_line;
use crate::dynamics::BracketSample;
use crate::error::{Error, Result};
use crate::quad::gauss_on;
use crate::report::{FitModel, FitParam, FitResult};

/// Derivative at `at` of the parabola through three points.
fn lagrange_deriv(t: [f64; 3], y: [f64; 3], at: f64) -> f64 {
    let mut d = 0.0;
    for k in 0..3 {
        let (p, q) = ((k + 1) % 3, (k + 2) % 3);
        let den = (t[k] - t[p]) * (t[k] - t[q]);
        d += y[k] * ((at - t[p]) + (at - t[q])) / den;
    }
    d
}

/// Centered differences inside, second-order one-sided stencils at the ends.
pub fn time_derivative(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    (0..n)
        .map(|k| {
            let c = k.clamp(1, n - 2);
            lagrange_deriv([t[c - 1], t[c], t[c + 1]], [y[c - 1], y[c], y[c + 1]], t[k])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffIneqAudit {
    /// Smallest `C` with `L' >= epsilon (L / pi - C)` at every sample.
    pub c4_fit: f64,
    /// `(t, L, exp(epsilon t / pi) (L(0) - pi C4))`.
    pub floor: Vec<(f64, f64, f64)>,
    pub floor_respected: bool,
    /// Regression of `L' / epsilon` on `L`: slope near `1/pi`, intercept `-C`.
    pub regression: FitResult,
    /// Rate of `log(L - pi C4)` against `t` where positive; `epsilon / pi` for equality.
    pub growth_exponent: Option<f64>,
}

pub fn diffineq_audit(history: &[BracketSample], epsilon: f64) -> Result<DiffIneqAudit> {
    if history.len() < 10 {
        return Err(Error::InsufficientSamples(format!("{} bracket samples, need 10", history.len())));
    }
    if !(epsilon > 0.0) {
        return Err(Error::NonpositiveInput(format!("epsilon = {epsilon}")));
    }
    let t: Vec<f64> = history.iter().map(|s| s.t).collect();
    let l: Vec<f64> = history.iter().map(|s| s.log_ratio).collect();
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSpec("bracket history times must increase".into()));
    }
    let dl = time_derivative(&t, &l);
    let c4 = l.iter().zip(&dl).map(|(l, d)| l / PI - d / epsilon).fold(f64::NEG_INFINITY, f64::max);
    let l0 = l[0];
    let floor: Vec<(f64, f64, f64)> = t
        .iter()
        .zip(&l)
        .map(|(&t, &l)| (t, l, (epsilon * (t - history[0].t) / PI).exp() * (l0 - PI * c4)))
        .collect();
    let floor_respected = floor.iter().all(|(_, l, f)| *l >= f - 1e-12 * l.abs().max(1.0));
    let rate: Vec<f64> = dl.iter().map(|d| d / epsilon).collect();
    let lf = fit_line(&l, &rate).ok();
    let regression = FitResult {
        model: FitModel::Linear,
        params: match lf {
            Some(f) => vec![
                FitParam { name: "slope".into(), value: f.slope, lo: f.slope - f.slope_ci, hi: f.slope + f.slope_ci },
                FitParam {
                    name: "c".into(),
                    value: -f.intercept,
                    lo: -f.intercept - f.intercept_ci,
                    hi: -f.intercept + f.intercept_ci,
                },
            ],
            None => Vec::new(),
        },
        residual_norm: lf.map_or(f64::NAN, |f| f.rms),
        window: (t[0], t[t.len() - 1]),
    };
    let (gt, gy): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(&l)
        .filter(|(_, l)| **l - PI * c4 > 0.0)
        .map(|(t, l)| (*t, (l - PI * c4).ln()))
        .unzip();
    let growth_exponent = fit_line(&gt, &gy).ok().map(|f| f.slope);
    Ok(DiffIneqAudit { c4_fit: c4, floor, floor_respected, regression, growth_exponent })
}

/// `int_{[2a, 1] x [0, 2a]} y1 y2 / |y|^4 dy` by composite Gauss quadrature.
pub fn rectangle_integral(a: f64) -> f64 {
    let lo = 2.0 * a;
    // panels graded geometrically away from the corner (2a, 0)
    let mut cuts = vec![lo];
    let mut w = lo;
    while cuts.last().copied().unwrap_or(1.0) < 1.0 {
        let next = (cuts.last().unwrap() + w).min(1.0);
        cuts.push(next);
        w *= 2.0;
    }
    let rule2 = gauss_on(0.0, lo, 16);
    let mut s = 0.0;
    for p in cuts.windows(2) {
        for (y1, w1) in gauss_on(p[0], p[1], 16) {
            for &(y2, w2) in &rule2 {
                let r2 = y1 * y1 + y2 * y2;
                s += w1 * w2 * y1 * y2 / (r2 * r2);
            }
        }
    }
    s
}

/// Largest [`rectangle_integral`] over a logarithmic grid of `a` in `(0, 1/2)`.
pub fn c3_constant(points: usize) -> (f64, f64) {
    let (lo, hi) = (1e-8f64, 0.499f64);
    (0..points.max(2))
        .map(|k| {
            let a = lo * (hi / lo).powf(k as f64 / (points.max(2) - 1) as f64);
            (a, rectangle_integral(a))
        })
        .fold((0.0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn history(f: impl Fn(f64) -> f64, n: usize, dt: f64) -> Vec<BracketSample> {
        (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                BracketSample { t, a: 1e-3, b: 1e-3 * f(t).exp(), log_ratio: f(t) }
            })
            .collect()
    }

    #[test]
    fn equality_solution_recovers_constant_and_rate() {
        let (eps, c) = (0.5, 0.7);
        let h = history(|t| 2.0 * (eps * t / PI).exp() + PI * c, 200, 0.1);
        let a = diffineq_audit(&h, eps).unwrap();
        assert!((a.c4_fit - c).abs() < 0.01 * c, "{}", a.c4_fit);
        assert!((a.growth_exponent.unwrap() / (eps / PI) - 1.0).abs() < 0.01);
        assert!(a.floor_respected);
    }

    #[test]
    fn frozen_brackets() {
        let h = history(|_| 3.0, 20, 0.1);
        let a = diffineq_audit(&h, 0.5).unwrap();
        assert!(a.c4_fit >= 3.0 / PI - 1e-12);
    }

    #[test]
    fn needs_ten_samples() {
        let h = history(|_| 3.0, 9, 0.1);
        assert!(matches!(diffineq_audit(&h, 0.5), Err(Error::InsufficientSamples(_))));
    }

    #[test]
    fn derivative_stencils_are_exact_for_parabolas() {
        let t: Vec<f64> = (0..7).map(|k| 0.3 * k as f64 + 0.01 * (k * k) as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 1.0 - 2.0 * t + 3.0 * t * t).collect();
        for (t, d) in t.iter().zip(time_derivative(&t, &y)) {
            assert!((d - (-2.0 + 6.0 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn rectangle_integral_matches_closed_form() {
        for a in [1e-6f64, 1e-3, 0.05, 0.2, 0.45] {
            let exact = 0.25 * (2.0 / (1.0 + 4.0 * a * a)).ln();
            assert!((rectangle_integral(a) - exact).abs() < 1e-10, "a = {a}");
        }
        let (_, c3) = c3_constant(200);
        assert!((c3 - 0.25 * 2f64.ln()).abs() < 1e-8);
    }
}
