use serde::{Deserialize, Serialize};

use crate::elliptic::{biot_savart, SpectralWorkspace};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{DomainKind, Parity};

/// Initial velocity `epsilon grad_perp phi` with `Laplace phi = f`, `phi = 0` on the walls.
pub fn make_velocity(ws: &mut SpectralWorkspace, f: &ScalarField, epsilon: f64) -> Result<VectorField> {
    f.grid().ensure_kind(DomainKind::Strip)?;
    if f.parity().x1 != Parity::Odd {
        return Err(Error::InvalidSpec("profile must be tagged odd in x1".into()));
    }
    Ok(biot_savart(ws, f)?.scaled(epsilon))
}

/// Quadrature rule across the strip in `x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    Trapezoid,
    Simpson,
}

/// `(1/2) int |u|^2` over the grid's domain.
pub fn kinetic_energy(u: &VectorField) -> f64 {
    kinetic_energy_with(u, Quadrature::Trapezoid)
}

pub fn kinetic_energy_with(u: &VectorField, rule: Quadrature) -> f64 {
    let g = u.grid();
    let n1 = g.n1();
    let rows = g.rows();
    let row_sum = |j: usize| -> f64 {
        let a = &u.c1.values()[j * n1..(j + 1) * n1];
        let b = &u.c2.values()[j * n1..(j + 1) * n1];
        a.iter().zip(b).map(|(x, y)| x * x + y * y).sum()
    };
    let weights: Vec<f64> = match g.kind() {
        DomainKind::DoubledTorus => vec![1.0; rows],
        DomainKind::Strip => {
            let last = rows - 1;
            match rule {
                Quadrature::Simpson if last % 2 == 0 => (0..rows)
                    .map(|j| {
                        if j == 0 || j == last {
                            1.0 / 3.0
                        } else if j % 2 == 1 {
                            4.0 / 3.0
                        } else {
                            2.0 / 3.0
                        }
                    })
                    .collect(),
                _ => (0..rows).map(|j| if j == 0 || j == last { 0.5 } else { 1.0 }).collect(),
            }
        }
    };
    let s: f64 = (0..rows).map(|j| weights[j] * row_sum(j)).sum();
    0.5 * s * g.h1() * g.h2()
}

/// Trapezoid and Simpson energies and their relative difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheck {
    pub trapezoid: f64,
    pub simpson: f64,
    pub rel_diff: f64,
}

pub fn energy_check(u: &VectorField) -> EnergyCheck {
    let trapezoid = kinetic_energy_with(u, Quadrature::Trapezoid);
    let simpson = kinetic_energy_with(u, Quadrature::Simpson);
    let rel_diff = if simpson > 0.0 { (trapezoid - simpson).abs() / simpson } else { 0.0 };
    EnergyCheck { trapezoid, simpson, rel_diff }
}

/// Smallness gate `K(0) = C1 epsilon^2 <= sigma / 20`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBudget {
    pub c1: f64,
    pub sigma: f64,
    pub epsilon0: f64,
}

impl EnergyBudget {
    pub fn k0(&self, epsilon: f64) -> f64 {
        self.c1 * epsilon * epsilon
    }

    pub fn limit(&self) -> f64 {
        self.sigma / 20.0
    }

    pub fn passes(&self, epsilon: f64) -> bool {
        self.k0(epsilon) <= self.limit()
    }

    pub fn check(&self, epsilon: f64) -> Result<()> {
        if self.passes(epsilon) {
            Ok(())
        } else {
            Err(Error::EnergyGate { k0: self.k0(epsilon), limit: self.limit() })
        }
    }
}

/// Threshold `epsilon0 = (20 C1 / sigma)^(-1/2)`.
pub fn epsilon_gate(c1: f64, sigma: f64) -> Result<EnergyBudget> {
    if !(c1 > 0.0) {
        return Err(Error::NonpositiveInput(format!("C1 = {c1}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::NonpositiveInput(format!("sigma = {sigma}")));
    }
    Ok(EnergyBudget { c1, sigma, epsilon0: (20.0 * c1 / sigma).powf(-0.5) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ParityClass, TorusGrid};

    #[test]
    fn uniform_flow_energy_is_area_over_two() {
        let g = TorusGrid::strip(32, 32).unwrap();
        let one = ScalarField::from_fn(g, ParityClass::NONE, |_, _| 1.0).unwrap();
        let u = VectorField::new(one, ScalarField::zeros(g, ParityClass::NONE)).unwrap();
        assert!((kinetic_energy(&u) - 1.0).abs() < 1e-14);
        assert!((kinetic_energy_with(&u, Quadrature::Simpson) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gate_arithmetic() {
        let b = epsilon_gate(0.05, 1.0).unwrap();
        assert!((b.epsilon0 - 1.0).abs() < 1e-15);
        let e = b.epsilon0 / 2.0;
        assert!(b.passes(e));
        assert!(b.k0(e) <= b.sigma / 80.0 + 1e-15);
        assert!(!b.passes(1.01));
        assert!(matches!(epsilon_gate(0.0, 1.0), Err(Error::NonpositiveInput(_))));
    }
}
