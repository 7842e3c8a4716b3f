use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::DomainKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidVerdict {
    /// Grid nodes in `{a < x1 < b, 0 <= x2 <= x1}`.
    pub cells: usize,
    pub violations: usize,
    pub fraction: f64,
    pub pass: bool,
}

/// Fraction of nodes in the trapezoid where `|omega - epsilon| > tol epsilon`.
pub fn trapezoid_check(omega: &ScalarField, a: f64, b: f64, epsilon: f64, tol: f64) -> Result<TrapezoidVerdict> {
    let g = omega.grid();
    g.ensure_kind(DomainKind::Strip)?;
    if !(0.0 < a && a < b && b < 1.0) {
        return Err(Error::EmptyRegion(format!("need 0 < a < b < 1, got a = {a:e}, b = {b:e}")));
    }
    let h = g.h1();
    let thresh = tol * epsilon.abs();
    let (mut cells, mut violations) = (0, 0);
    let k_lo = (a / h).floor() as usize + 1;
    let mut k = k_lo;
    while (k as f64) * h < b {
        let x1 = k as f64 * h;
        if x1 > a {
            let i = g.axis() + k;
            for j in 0..g.rows() {
                if g.x2(j) > x1 {
                    break;
                }
                cells += 1;
                if (omega.get(i, j) - epsilon).abs() > thresh {
                    violations += 1;
                }
            }
        }
        k += 1;
    }
    if cells == 0 {
        return Err(Error::EmptyRegion(format!("no grid nodes with {a:e} < x1 < {b:e} at h = {h}")));
    }
    Ok(TrapezoidVerdict {
        cells,
        violations,
        fraction: violations as f64 / cells as f64,
        pass: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ParityClass, TorusGrid};

    #[test]
    fn constant_and_zero_fields() {
        let g = TorusGrid::strip(128, 128).unwrap();
        let eps = 0.5;
        let w = ScalarField::from_fn(g, ParityClass::NONE, |_, _| eps).unwrap();
        let v = trapezoid_check(&w, 0.01, 0.2, eps, 1e-3).unwrap();
        assert!(v.pass && v.fraction == 0.0 && v.cells > 0);
        let z = ScalarField::zeros(g, ParityClass::NONE);
        let v = trapezoid_check(&z, 0.01, 0.2, eps, 1e-3).unwrap();
        assert!(!v.pass && v.fraction == 1.0);
    }

    #[test]
    fn region_counts_nodes_under_the_diagonal() {
        let g = TorusGrid::strip(16, 16).unwrap();
        let w = ScalarField::zeros(g, ParityClass::NONE);
        // x1 in {0.25, 0.375} with 3 and 4 nodes at or below the diagonal
        let v = trapezoid_check(&w, 0.2, 0.4, 1.0, 0.1).unwrap();
        assert_eq!(v.cells, 7);
    }

    #[test]
    fn subgrid_region_is_empty() {
        let g = TorusGrid::strip(64, 64).unwrap();
        let w = ScalarField::zeros(g, ParityClass::NONE);
        assert!(matches!(trapezoid_check(&w, 1e-4, 1e-3, 1.0, 0.1), Err(Error::EmptyRegion(_))));
        assert!(matches!(trapezoid_check(&w, 0.3, 0.2, 1.0, 0.1), Err(Error::EmptyRegion(_))));
    }
}
