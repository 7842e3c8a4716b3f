//! Poisson and Biot-Savart solves on the doubled torus and the strip.

use crate::elliptic::spectral::SpectralWorkspace;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{DomainKind, ParityClass, TorusGrid};

/// Absolute tolerance on the mean of a torus right-hand side.
pub const MEAN_TOL: f64 = 1e-12;

fn check_workspace(ws: &SpectralWorkspace, grid: &TorusGrid) -> Result<()> {
    if !ws.matches(grid) {
        return Err(Error::GridMismatch(format!(
            "workspace {:?} used with grid {}x{}",
            ws.dims(),
            grid.n1(),
            grid.n2()
        )));
    }
    Ok(())
}

fn torus_input(omega: &ScalarField) -> Result<std::borrow::Cow<'_, ScalarField>> {
    match omega.grid().kind() {
        DomainKind::DoubledTorus => {
            let mean = omega.mean();
            let tol = MEAN_TOL * omega.linf().max(1.0);
            if mean.abs() > tol {
                return Err(Error::NonzeroMean { mean, tol });
            }
            Ok(std::borrow::Cow::Borrowed(omega))
        }
        DomainKind::Strip => Ok(std::borrow::Cow::Owned(omega.extend_odd_x2()?)),
    }
}

/// Parity of `(d2 psi, -d1 psi)` given the parity of `psi`.
pub fn velocity_parity(p: ParityClass) -> (ParityClass, ParityClass) {
    (ParityClass::new(p.x1, p.x2.flip()), ParityClass::new(p.x1.flip(), p.x2))
}

/// Zero-mean solution of `Laplace psi = omega` without the final symmetrization.
pub fn solve_poisson_torus_raw(
    ws: &mut SpectralWorkspace,
    omega: &ScalarField,
) -> Result<ScalarField> {
    omega.grid().ensure_kind(DomainKind::DoubledTorus)?;
    check_workspace(ws, omega.grid())?;
    let omega = torus_input(omega)?;
    let mut psi = vec![0.0; omega.grid().len()];
    ws.poisson(omega.values(), &mut psi);
    ScalarField::new(*omega.grid(), psi, omega.parity())
}

/// Zero-mean solution of `Laplace psi = omega` on the doubled torus.
pub fn solve_poisson_torus(ws: &mut SpectralWorkspace, omega: &ScalarField) -> Result<ScalarField> {
    Ok(solve_poisson_torus_raw(ws, omega)?.symmetrized())
}

/// Velocity without the final symmetrization, on the grid kind of the input.
pub fn biot_savart_raw(ws: &mut SpectralWorkspace, omega: &ScalarField) -> Result<VectorField> {
    check_workspace(ws, omega.grid())?;
    let torus = torus_input(omega)?;
    let g = *torus.grid();
    let (mut u1, mut u2) = (vec![0.0; g.len()], vec![0.0; g.len()]);
    ws.velocity(torus.values(), &mut u1, &mut u2);
    let (p1, p2) = velocity_parity(torus.parity());
    let u = VectorField::new(ScalarField::new(g, u1, p1)?, ScalarField::new(g, u2, p2)?)?;
    match omega.grid().kind() {
        DomainKind::DoubledTorus => Ok(u),
        DomainKind::Strip => u.restrict_to_strip(),
    }
}

/// Velocity `U = (d2 psi, -d1 psi)` with `Laplace psi = omega`.
///
/// A strip input is extended oddly across `x2 = 0` first and the result is
/// restricted back, so `U2` vanishes on both walls.
pub fn biot_savart(ws: &mut SpectralWorkspace, omega: &ScalarField) -> Result<VectorField> {
    let mut u = biot_savart_raw(ws, omega)?;
    u.c1.symmetrize();
    u.c2.symmetrize();
    Ok(u)
}

/// Dirichlet problem on the strip via the odd extension.
pub fn solve_dirichlet_strip(ws: &mut SpectralWorkspace, omega: &ScalarField) -> Result<ScalarField> {
    omega.grid().ensure_kind(DomainKind::Strip)?;
    check_workspace(ws, omega.grid())?;
    let ext = omega.extend_odd_x2()?;
    solve_poisson_torus(ws, &ext)?.restrict_to_strip()
}

/// Spectral divergence of a doubled-torus vector field.
pub fn spectral_divergence(ws: &mut SpectralWorkspace, u: &VectorField) -> Result<ScalarField> {
    u.grid().ensure_kind(DomainKind::DoubledTorus)?;
    check_workspace(ws, u.grid())?;
    let mut out = vec![0.0; u.grid().len()];
    ws.divergence(u.c1.values(), u.c2.values(), &mut out);
    ScalarField::new(*u.grid(), out, ParityClass::NONE)
}

/// Spectral curl `d2 u1 - d1 u2`, for a torus field or a strip field
/// with `u1` even and `u2` odd across the walls.
pub fn spectral_curl(ws: &mut SpectralWorkspace, u: &VectorField) -> Result<ScalarField> {
    check_workspace(ws, u.grid())?;
    let g = *u.grid();
    let d = g.as_doubled();
    let (a, b) = match g.kind() {
        DomainKind::DoubledTorus => (u.c1.values().to_vec(), u.c2.values().to_vec()),
        DomainKind::Strip => (extend_even(&d, u.c1.values()), u.c2.extend_odd_x2()?.into_values()),
    };
    let mut out = vec![0.0; d.len()];
    ws.curl(&a, &b, &mut out);
    let w = ScalarField::new(d, out, ParityClass::new(u.c1.parity().x1, crate::grid::Parity::Odd))?;
    match g.kind() {
        DomainKind::DoubledTorus => Ok(w),
        DomainKind::Strip => w.restrict_to_strip(),
    }
}

fn extend_even(doubled: &TorusGrid, strip: &[f64]) -> Vec<f64> {
    let (n1, n2) = (doubled.n1(), doubled.n2());
    let half = n2 / 2;
    let mut out = vec![0.0; doubled.len()];
    for j in 0..=half {
        let row = &strip[j * n1..(j + 1) * n1];
        let up = ((half + j) % n2) * n1;
        out[up..up + n1].copy_from_slice(row);
        let down = (half - j) * n1;
        out[down..down + n1].copy_from_slice(row);
    }
    out
}

/// Largest raw parity violation of the solver outputs for `omega`.
pub fn symmetry_audit(ws: &mut SpectralWorkspace, omega: &ScalarField) -> Result<f64> {
    let torus = torus_input(omega)?.into_owned();
    let psi = solve_poisson_torus_raw(ws, &torus)?;
    let u = biot_savart_raw(ws, &torus)?;
    Ok(psi.parity_violation().max(u.parity_violation()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Parity;
    use std::f64::consts::PI;

    #[test]
    fn eigenfunction_velocity_matches_closed_form() {
        let g = TorusGrid::doubled(64, 64).unwrap();
        let mut ws = SpectralWorkspace::new(&g);
        let w = ScalarField::from_fn(g, ParityClass::ODD_ODD, |x, y| (PI * x).sin() * (PI * y).sin())
            .unwrap();
        let psi = solve_poisson_torus(&mut ws, &w).unwrap();
        let u = biot_savart(&mut ws, &w).unwrap();
        let c = 1.0 / (2.0 * PI * PI);
        let mut err: f64 = 0.0;
        for j in 0..g.rows() {
            for i in 0..g.n1() {
                let (x, y) = (g.x1(i), g.x2(j));
                err = err.max((psi.get(i, j) + c * (PI * x).sin() * (PI * y).sin()).abs());
                let u1 = -(PI * x).sin() * (PI * y).cos() / (2.0 * PI);
                let u2 = (PI * x).cos() * (PI * y).sin() / (2.0 * PI);
                err = err.max((u.c1.get(i, j) - u1).abs()).max((u.c2.get(i, j) - u2).abs());
            }
        }
        assert!(err < 1e-12, "{err}");
        assert_eq!(u.c1.parity(), ParityClass::new(Parity::Odd, Parity::Even));
        assert_eq!(u.c2.parity(), ParityClass::new(Parity::Even, Parity::Odd));
    }

    #[test]
    fn nonzero_mean_is_rejected() {
        let g = TorusGrid::doubled(16, 16).unwrap();
        let mut ws = SpectralWorkspace::new(&g);
        let w = ScalarField::from_fn(g, ParityClass::NONE, |_, _| 1.0).unwrap();
        assert!(matches!(
            solve_poisson_torus(&mut ws, &w),
            Err(Error::NonzeroMean { .. })
        ));
    }

    #[test]
    fn strip_velocity_vanishes_normal_to_walls() {
        let g = TorusGrid::strip(32, 32).unwrap();
        let mut ws = SpectralWorkspace::new(&g);
        let w = ScalarField::from_fn(g, ParityClass::new(Parity::Odd, Parity::None), |x, _| {
            (PI * x).sin()
        })
        .unwrap();
        let u = biot_savart(&mut ws, &w).unwrap();
        let last = g.rows() - 1;
        for i in 0..g.n1() {
            assert_eq!(u.c2.get(i, 0), 0.0);
            assert_eq!(u.c2.get(i, last), 0.0);
        }
    }

    #[test]
    fn workspace_size_is_checked() {
        let g = TorusGrid::doubled(16, 16).unwrap();
        let mut ws = SpectralWorkspace::new(&TorusGrid::doubled(32, 32).unwrap());
        let w = ScalarField::zeros(g, ParityClass::ODD_ODD);
        assert!(matches!(biot_savart(&mut ws, &w), Err(Error::GridMismatch(_))));
    }
}
