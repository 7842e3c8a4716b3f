//! Harmonic functions on the strip vanishing on the bottom wall.
//!
//! `F(x1, x2) = a0 x2 + sum_k (a_k cos(pi k x1) + b_k sin(pi k x1)) sinh(pi k x2) / sinh(pi k)`
//! is the harmonic extension of its top boundary values. Its perpendicular
//! gradient `e = (d2 F, -d1 F)` is the error-field class used to perturb
//! the velocity.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{DomainKind, Parity, ParityClass, TorusGrid};

/// Samples of a top-wall boundary function on the `x1` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    values: Vec<f64>,
    parity: Parity,
}

impl BoundaryData {
    pub fn new(values: Vec<f64>, parity: Parity) -> Result<Self> {
        if values.len() < 8 || values.len() % 2 != 0 {
            return Err(Error::InvalidGrid(format!("{} boundary samples", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("boundary data".into()));
        }
        Ok(Self { values, parity })
    }

    pub fn from_fn(n1: usize, parity: Parity, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = 2.0 / n1 as f64;
        Self::new((0..n1).map(|i| f(-1.0 + i as f64 * h)).collect(), parity)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }
}

/// One Fourier mode of the boundary data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: usize,
    pub cos: f64,
    pub sin: f64,
}

/// Harmonic extension in series form.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExtension {
    a0: f64,
    modes: Vec<Mode>,
    parity: Parity,
}

/// `sinh(pi k y) / sinh(pi k)` and `cosh(pi k y) / sinh(pi k)` without overflow.
fn profiles(k: usize, y: f64) -> (f64, f64) {
    let a = PI * k as f64;
    let e = (a * (y - 1.0)).exp();
    let d = 1.0 - (-2.0 * a).exp();
    let q = (-2.0 * a * y).exp();
    (e * (1.0 - q) / d, e * (1.0 + q) / d)
}

impl HarmonicExtension {
    /// Series from sampled boundary data.
    pub fn from_boundary(g: &BoundaryData) -> Self {
        let n = g.values.len();
        let mut buf: Vec<Complex64> = g.values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let coef = |m: usize| {
            let s = if m % 2 == 0 { 1.0 } else { -1.0 };
            buf[m] * (s / n as f64)
        };
        let mut a0 = coef(0).re;
        let mut modes = Vec::new();
        for k in 1..=n / 2 {
            let c = coef(k);
            let (mut ca, mut sb) = if k == n / 2 { (c.re, 0.0) } else { (2.0 * c.re, -2.0 * c.im) };
            match g.parity {
                Parity::Odd => ca = 0.0,
                Parity::Even => sb = 0.0,
                Parity::None => {}
            }
            if ca != 0.0 || sb != 0.0 {
                modes.push(Mode { k, cos: ca, sin: sb });
            }
        }
        if g.parity == Parity::Odd {
            a0 = 0.0;
        }
        Self { a0, modes, parity: g.parity }
    }

    /// Series with odd sine modes `sum amp sin(pi k x1)` on the top wall.
    pub fn from_sine_modes(modes: &[(usize, f64)]) -> Result<Self> {
        if modes.iter().any(|(k, a)| *k == 0 || !a.is_finite()) {
            return Err(Error::InvalidSpec("sine modes need k >= 1 and finite amplitudes".into()));
        }
        // repeated wavenumbers are summed so the energy sees their cross terms
        let mut merged = std::collections::BTreeMap::new();
        for &(k, a) in modes {
            *merged.entry(k).or_insert(0.0) += a;
        }
        let modes = merged.into_iter().map(|(k, a)| Mode { k, cos: 0.0, sin: a }).collect();
        Ok(Self { a0: 0.0, modes, parity: Parity::Odd })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            a0: self.a0 * c,
            modes: self.modes.iter().map(|m| Mode { k: m.k, cos: m.cos * c, sin: m.sin * c }).collect(),
            parity: self.parity,
        }
    }

    /// `int_strip |grad F|^2`, exact for the series.
    pub fn gradient_energy(&self) -> f64 {
        let mut s = 2.0 * self.a0 * self.a0;
        for m in &self.modes {
            let a = PI * m.k as f64;
            let coth = 1.0 / (a.tanh());
            s += a * coth * (m.cos * m.cos + m.sin * m.sin);
        }
        s
    }

    /// Rescaled so that `int_strip |grad F|^2` equals `target`.
    pub fn normalized(&self, target: f64) -> Result<Self> {
        let e = self.gradient_energy();
        if !(e > 0.0) {
            return Err(Error::NonPositiveNorm("harmonic extension has zero energy".into()));
        }
        Ok(self.scaled((target / e).sqrt()))
    }

    /// `F`, `d1 F`, `d2 F`, `d11 F`, `d12 F` at a point.
    pub fn derivatives(&self, x1: f64, x2: f64) -> [f64; 5] {
        let mut out = [self.a0 * x2, 0.0, self.a0, 0.0, 0.0];
        for m in &self.modes {
            let a = PI * m.k as f64;
            let (s, c) = (a * x1).sin_cos();
            let (sh, ch) = profiles(m.k, x2);
            let t = m.cos * c + m.sin * s;
            let dt = a * (-m.cos * s + m.sin * c);
            out[0] += t * sh;
            out[1] += dt * sh;
            out[2] += a * t * ch;
            out[3] -= a * a * t * sh;
            out[4] += a * dt * ch;
        }
        out
    }

    /// Error velocity `(d2 F, -d1 F)` at a point; valid for any `x2`.
    pub fn error_at(&self, x1: f64, x2: f64) -> [f64; 2] {
        let d = self.derivatives(x1, x2);
        [d[2], -d[1]]
    }

    fn sample(&self, grid: &TorusGrid, pick: impl Fn(&[f64; 5]) -> f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(grid.len());
        for j in 0..grid.rows() {
            let x2 = grid.x2(j);
            for i in 0..grid.n1() {
                v.push(pick(&self.derivatives(grid.x1(i), x2)));
            }
        }
        v
    }

    /// `F` on a strip grid.
    pub fn field(&self, grid: &TorusGrid) -> Result<ScalarField> {
        grid.ensure_kind(DomainKind::Strip)?;
        let mut v = self.sample(grid, |d| d[0]);
        v[..grid.n1()].fill(0.0);
        Ok(ScalarField::new(*grid, v, ParityClass::new(self.parity, Parity::None))?.symmetrized())
    }

    /// `e = (d2 F, -d1 F)` on a strip grid, with exact parity.
    pub fn error_field(&self, grid: &TorusGrid) -> Result<VectorField> {
        grid.ensure_kind(DomainKind::Strip)?;
        let e1 = self.sample(grid, |d| d[2]);
        let mut e2 = self.sample(grid, |d| -d[1]);
        e2[..grid.n1()].fill(0.0);
        let p1 = ParityClass::new(self.parity, Parity::None);
        let p2 = ParityClass::new(self.parity.flip(), Parity::None);
        VectorField::new(
            ScalarField::new(*grid, e1, p1)?.symmetrized(),
            ScalarField::new(*grid, e2, p2)?.symmetrized(),
        )
    }

    /// `sup |grad e|` (Frobenius) over grid points of the half-ball around the origin.
    pub fn gradient_sup_in_ball(&self, grid: &TorusGrid, radius: f64) -> f64 {
        let mut best: f64 = 0.0;
        for j in 0..grid.rows() {
            let x2 = grid.x2(j);
            for i in 0..grid.n1() {
                let x1 = grid.x1(i);
                if x1 * x1 + x2 * x2 < radius * radius {
                    let d = self.derivatives(x1, x2);
                    best = best.max((2.0 * (d[3] * d[3] + d[4] * d[4])).sqrt());
                }
            }
        }
        best
    }
}

/// Harmonic extension of boundary data onto a strip grid.
pub fn harmonic_extension(g: &BoundaryData, grid: &TorusGrid) -> Result<ScalarField> {
    if g.values.len() != grid.n1() {
        return Err(Error::GridMismatch(format!(
            "{} boundary samples for n1 = {}",
            g.values.len(),
            grid.n1()
        )));
    }
    HarmonicExtension::from_boundary(g).field(grid)
}

/// Error field `(d2 F, -d1 F)` of the extension of `g`.
pub fn error_field(g: &BoundaryData, grid: &TorusGrid) -> Result<VectorField> {
    if g.values.len() != grid.n1() {
        return Err(Error::GridMismatch("boundary samples vs grid".into()));
    }
    HarmonicExtension::from_boundary(g).error_field(grid)
}

/// `max |e_j(x)| / |x_j|` over grid points of `B_{1/2}` in the strip with `x_j != 0`.
pub fn linear_growth_constant(e: &VectorField) -> f64 {
    let g = e.grid();
    let mut best: f64 = 0.0;
    for j in 0..g.rows() {
        let x2 = g.x2(j);
        for i in 0..g.n1() {
            let x1 = g.x1(i);
            if x1 * x1 + x2 * x2 >= 0.25 {
                continue;
            }
            if x1 != 0.0 {
                best = best.max(e.c1.get(i, j).abs() / x1.abs());
            }
            if x2 != 0.0 {
                best = best.max(e.c2.get(i, j).abs() / x2);
            }
        }
    }
    best
}
