use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{DomainKind, Parity, ParityClass, TorusGrid};
use crate::params::SimParams;

/// Smooth monotone step used for every transition of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transition {
    /// `e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)})`, exactly 0 for `s <= 0` and 1 for `s >= 1`.
    ExpBump,
}

/// `C^infinity` step from 0 to 1 on `[0, 1]`.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

/// Shape of the initial vorticity profile `f` on the right half of the strip.
///
/// `f = 1` on `[kappa^m, 1 - delta]` in `x1`, rising on `[kappa^m / 2, kappa^m]`
/// and falling on `[1 - delta, 1 - delta / 2]`, optionally tapered to zero near
/// the walls. The left half is the odd reflection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kappa: f64,
    pub delta: f64,
    pub m: u32,
    pub taper_top: f64,
    pub taper_bottom: f64,
    pub transition: Transition,
}

impl ProfileSpec {
    pub fn from_params(p: &SimParams) -> Self {
        Self {
            kappa: p.kappa,
            delta: p.delta,
            m: p.m,
            taper_top: p.taper_top,
            taper_bottom: p.taper_bottom,
            transition: Transition::ExpBump,
        }
    }

    /// `[kappa^m, 1 - delta]`.
    pub fn plateau(&self) -> (f64, f64) {
        (self.kappa.powi(self.m as i32), 1.0 - self.delta)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.plateau();
        if !(0.0 < self.kappa && self.kappa < self.delta && self.delta < 0.5) || self.m == 0 {
            return Err(Error::InvalidSpec(format!(
                "need 0 < kappa < delta < 1/2 and m >= 1, got kappa = {}, delta = {}, m = {}",
                self.kappa, self.delta, self.m
            )));
        }
        if lo >= hi {
            return Err(Error::InvalidSpec("plateau is empty".into()));
        }
        for t in [self.taper_top, self.taper_bottom] {
            if !(0.0..=0.25).contains(&t) {
                return Err(Error::InvalidSpec(format!("taper width {t} outside [0, 1/4]")));
            }
        }
        Ok(())
    }

    /// `f(x1, x2)` for `x1` in `[-1, 1]`.
    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        let s = x1.abs();
        let (lo, hi) = self.plateau();
        let rise = smooth_step((s - 0.5 * lo) / (0.5 * lo));
        let fall = smooth_step((1.0 - 0.5 * self.delta - s) / (1.0 - 0.5 * self.delta - hi));
        let mut v = rise * fall;
        if self.taper_top > 0.0 {
            v *= smooth_step((1.0 - x2) / self.taper_top);
        }
        if self.taper_bottom > 0.0 {
            v *= smooth_step(x2 / self.taper_bottom);
        }
        if x1 < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// Profile `f` on a strip grid, odd in `x1` bitwise.
pub fn build_profile(spec: &ProfileSpec, grid: &TorusGrid) -> Result<ScalarField> {
    spec.validate()?;
    grid.ensure_kind(DomainKind::Strip)?;
    let (lo, hi) = spec.plateau();
    if hi - lo < 4.0 * grid.h1() {
        return Err(Error::InvalidSpec(format!(
            "plateau [{lo}, {hi}] is narrower than 4 cells at h = {}",
            grid.h1()
        )));
    }
    let n1 = grid.n1();
    let axis = grid.axis();
    let mut values = vec![0.0; grid.len()];
    for j in 0..grid.rows() {
        let x2 = grid.x2(j);
        let row = &mut values[j * n1..(j + 1) * n1];
        for i in axis + 1..n1 {
            let v = spec.value(grid.x1(i), x2);
            row[i] = v;
            row[grid.mirror1(i)] = -v;
        }
        row[axis] = 0.0;
        row[0] = 0.0;
    }
    ScalarField::new(*grid, values, ParityClass::new(Parity::Odd, Parity::None))
}

/// Initial vorticity `epsilon f`.
pub fn initial_vorticity(params: &SimParams) -> Result<ScalarField> {
    let f = build_profile(&ProfileSpec::from_params(params), &params.strip_grid()?)?;
    Ok(f.scaled(params.epsilon))
}

/// Area of `{x in (0, 1) x (0, 1) : |f - level| > tol |level|}` by cell counting.
pub fn exceptional_area(f: &ScalarField, level: f64, tol: f64) -> f64 {
    let g = f.grid();
    let (n1, half) = (g.n1(), g.n1() / 2);
    let last = g.rows() - 1;
    let thresh = tol * level.abs();
    let mut area = 0.0;
    for j in 0..g.rows() {
        let wj = if j == 0 || j == last { 0.5 } else { 1.0 };
        for k in 0..=half {
            let wk = if k == 0 || k == half { 0.5 } else { 1.0 };
            if (f.get((g.axis() + k) % n1, j) - level).abs() > thresh {
                area += wj * wk;
            }
        }
    }
    area * g.h1() * g.h2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ProfileSpec {
        ProfileSpec::from_params(&SimParams::default())
    }

    #[test]
    fn smooth_step_is_exact_outside_transition() {
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn plateau_and_axis_values() {
        let s = spec();
        let (lo, hi) = s.plateau();
        assert_eq!(s.value(0.5 * (lo + hi), 0.5), 1.0);
        for x2 in [0.0, 0.3, 1.0] {
            assert_eq!(s.value(0.0, x2), 0.0);
        }
        assert_eq!(s.value(1.0, 0.5), 0.0);
        assert_eq!(s.value(0.5 * lo, 0.5), 0.0);
    }

    #[test]
    fn profile_is_odd_bitwise() {
        let g = TorusGrid::strip(128, 128).unwrap();
        let f = build_profile(&spec(), &g).unwrap();
        assert_eq!(f.parity_violation_x1(), 0.0);
        assert!(f.values().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn exceptional_area_within_budget() {
        let s = spec();
        let g = TorusGrid::strip(256, 256).unwrap();
        let f = build_profile(&s, &g).unwrap();
        let area = exceptional_area(&f, 1.0, 1e-12);
        assert!(area < 2.0 * s.delta + 2.0 * s.taper_top, "{area}");
    }

    #[test]
    fn narrow_plateau_is_rejected() {
        let s = ProfileSpec { kappa: 0.3, delta: 0.45, m: 1, ..spec() };
        let g = TorusGrid::strip(16, 16).unwrap();
        assert!(matches!(build_profile(&s, &g), Err(Error::InvalidSpec(_))));
    }
}
