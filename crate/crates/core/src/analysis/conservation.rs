use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::report::{GrowthReport, Sample};

/// Drifts at or below this level are treated as round-off.
pub const ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub quantity: String,
    pub initial: f64,
    /// `max_t |Q(t) - Q(0)| / |Q(0)|`.
    pub max_drift: f64,
    pub pass: bool,
}

const QUANTITIES: [(&str, fn(&Sample) -> f64); 5] = [
    ("l1", |s| s.l1),
    ("l2", |s| s.l2),
    ("l4", |s| s.l4),
    ("linf", |s| s.linf),
    ("kinetic", |s| s.kinetic),
];

/// One row per conserved quantity; empty for fewer than two samples.
pub fn conservation_audit(report: &GrowthReport, drift_tol: f64) -> Vec<DriftRow> {
    if report.samples.len() < 2 {
        return Vec::new();
    }
    let first = &report.samples[0];
    QUANTITIES
        .iter()
        .map(|(name, get)| {
            let q0 = get(first);
            let max_drift = report
                .samples
                .iter()
                .map(|s| if q0 != 0.0 { (get(s) - q0).abs() / q0.abs() } else { get(s).abs() })
                .fold(0.0, f64::max);
            DriftRow { quantity: name.to_string(), initial: q0, max_drift, pass: max_drift <= drift_tol }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub quantity: String,
    pub coarse: f64,
    pub fine: f64,
    /// Strictly smaller on the fine grid, or both at round-off.
    pub shrinks: bool,
}

pub fn refinement_table(coarse: &[DriftRow], fine: &[DriftRow]) -> Vec<RefinementRow> {
    coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| RefinementRow {
            quantity: c.quantity.clone(),
            coarse: c.max_drift,
            fine: f.max_drift,
            shrinks: f.max_drift < c.max_drift || (c.max_drift <= ROUNDOFF && f.max_drift <= ROUNDOFF),
        })
        .collect()
}

/// Area of `{omega > level}` with trapezoid weights across the walls.
pub fn level_set_area(omega: &ScalarField, level: f64) -> f64 {
    let g = omega.grid();
    let last = g.rows() - 1;
    let mut s = 0.0;
    for j in 0..g.rows() {
        let w = if j == 0 || j == last { 0.5 } else { 1.0 };
        s += w * (0..g.n1()).filter(|&i| omega.get(i, j) > level).count() as f64;
    }
    s * g.h1() * g.h2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ParityClass, TorusGrid};

    fn s(t: f64, v: f64) -> Sample {
        Sample {
            t,
            grad_sup: 1.0,
            grad_x1: 0.0,
            grad_x2: 0.0,
            eta1: 0.0,
            a: 0.1,
            b: 0.2,
            kinetic: v,
            l1: v,
            l2: v,
            l4: v,
            linf: 1.0,
            parity_violation: 0.0,
        }
    }

    #[test]
    fn single_sample_has_no_rows() {
        let r = GrowthReport { samples: vec![s(0.0, 1.0)], ..Default::default() };
        assert!(conservation_audit(&r, 0.01).is_empty());
    }

    #[test]
    fn drift_is_relative_maximum() {
        let r = GrowthReport { samples: vec![s(0.0, 2.0), s(1.0, 2.03), s(2.0, 1.99)], ..Default::default() };
        let rows = conservation_audit(&r, 0.01);
        assert_eq!(rows.len(), 5);
        let l1 = rows.iter().find(|r| r.quantity == "l1").unwrap();
        assert!((l1.max_drift - 0.015).abs() < 1e-12 && !l1.pass);
        assert!(rows.iter().find(|r| r.quantity == "linf").unwrap().pass);
    }

    #[test]
    fn refinement_accepts_roundoff() {
        let row = |q: &str, d: f64| DriftRow { quantity: q.into(), initial: 1.0, max_drift: d, pass: true };
        let t = refinement_table(&[row("a", 1e-3), row("b", 0.0), row("c", 1e-4)], &[row("a", 5e-4), row("b", 0.0), row("c", 2e-4)]);
        assert!(t[0].shrinks && t[1].shrinks && !t[2].shrinks);
    }

    #[test]
    fn level_set_of_half_plane() {
        let g = TorusGrid::strip(64, 64).unwrap();
        let w = ScalarField::from_fn(g, ParityClass::NONE, |x, _| x).unwrap();
        // {x1 > 0.5}: nodes 0.53125 .. 0.96875, 15 columns of width h over height 1
        assert!((level_set_area(&w, 0.5) - 15.0 / 32.0).abs() < 1e-14);
    }
}
