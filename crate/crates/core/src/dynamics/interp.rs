//! Cubic Lagrange interpolation on the strip and on padded velocity grids.

use crate::elliptic::HarmonicExtension;
use crate::error::Result;
use crate::field::VectorField;
use crate::grid::{DomainKind, TorusGrid};

/// Rows added beyond each wall of a padded velocity grid.
pub const PAD: usize = 2;

/// Point evaluation of a velocity field.
pub trait VelocitySource {
    fn velocity(&self, x1: f64, x2: f64) -> [f64; 2];

    fn u1(&self, x1: f64, x2: f64) -> f64 {
        self.velocity(x1, x2)[0]
    }

    /// Sampling step used when scanning for extrema.
    fn spacing(&self) -> f64 {
        1.0 / 256.0
    }
}

impl<F: Fn(f64, f64) -> [f64; 2]> VelocitySource for F {
    fn velocity(&self, x1: f64, x2: f64) -> [f64; 2] {
        self(x1, x2)
    }
}

/// Weights for nodes `-1, 0, 1, 2` at offset `t` in `[0, 1)`.
#[inline]
pub fn cubic_weights(t: f64) -> [f64; 4] {
    let tm1 = t - 1.0;
    let tm2 = t - 2.0;
    let tp1 = t + 1.0;
    [
        -t * tm1 * tm2 / 6.0,
        tp1 * tm1 * tm2 / 2.0,
        -tp1 * t * tm2 / 2.0,
        tp1 * t * tm1 / 6.0,
    ]
}

/// Weights for nodes `0, 1, 2, 3` at `tau` in `[0, 3]`.
#[inline]
fn shifted_weights(tau: f64) -> [f64; 4] {
    let (a, b, c, d) = (tau, tau - 1.0, tau - 2.0, tau - 3.0);
    [-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0]
}

#[inline]
fn periodic_columns(x1: f64, inv_h: f64, n1: usize) -> ([usize; 4], f64) {
    // measured from the axis so that tiny |x1| keeps full relative precision
    let s = x1 * inv_h;
    let f = s.floor();
    let t = s - f;
    let i = (f as i64 + (n1 / 2) as i64).rem_euclid(n1 as i64) as usize;
    let cols = [(i + n1 - 1) % n1, i, (i + 1) % n1, (i + 2) % n1];
    (cols, t)
}

/// Velocity samples on strip rows `-PAD ..= rows - 1 + PAD`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    n1: usize,
    n2: usize,
    h1: f64,
    h2: f64,
    inv_h1: f64,
    inv_h2: f64,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl VelocityGrid {
    /// Strip rows of a doubled-torus velocity, periodic in `x2`.
    pub fn from_torus_values(grid: &TorusGrid, u1: &[f64], u2: &[f64]) -> Self {
        let (n1, n2) = (grid.n1(), grid.n2());
        let rows = n2 / 2 + 1 + 2 * PAD;
        let mut a = Vec::with_capacity(rows * n1);
        let mut b = Vec::with_capacity(rows * n1);
        for r in 0..rows {
            let j = r as i64 - PAD as i64;
            let src = (j + (n2 / 2) as i64).rem_euclid(n2 as i64) as usize;
            a.extend_from_slice(&u1[src * n1..(src + 1) * n1]);
            b.extend_from_slice(&u2[src * n1..(src + 1) * n1]);
        }
        Self::assemble(grid, a, b)
    }

    /// Padded grid from a strip field, reflecting `u1` evenly and `u2` oddly across the walls.
    pub fn from_strip(u: &VectorField) -> Result<Self> {
        let g = u.grid();
        g.ensure_kind(DomainKind::Strip)?;
        let n1 = g.n1();
        let last = g.rows() - 1;
        let rows = g.rows() + 2 * PAD;
        let mut a = Vec::with_capacity(rows * n1);
        let mut b = Vec::with_capacity(rows * n1);
        for r in 0..rows {
            let j = r as i64 - PAD as i64;
            let (src, sign) = if j < 0 {
                ((-j) as usize, -1.0)
            } else if j as usize > last {
                (2 * last - j as usize, -1.0)
            } else {
                (j as usize, 1.0)
            };
            a.extend_from_slice(&u.c1.values()[src * n1..(src + 1) * n1]);
            b.extend(u.c2.values()[src * n1..(src + 1) * n1].iter().map(|v| sign * v));
        }
        Ok(Self::assemble(g, a, b))
    }

    fn assemble(g: &TorusGrid, u1: Vec<f64>, u2: Vec<f64>) -> Self {
        Self {
            n1: g.n1(),
            n2: g.n2(),
            h1: g.h1(),
            h2: g.h2(),
            inv_h1: g.n1() as f64 / 2.0,
            inv_h2: g.n2() as f64 / 2.0,
            u1,
            u2,
        }
    }

    /// Adds an analytic error field on every padded row.
    pub fn add_error(&mut self, e: &HarmonicExtension) {
        for (r, (a, b)) in self.u1.chunks_mut(self.n1).zip(self.u2.chunks_mut(self.n1)).enumerate() {
            let x2 = (r as f64 - PAD as f64) * self.h2;
            for i in 0..self.n1 {
                let v = e.error_at(-1.0 + i as f64 * self.h1, x2);
                a[i] += v[0];
                b[i] += v[1];
            }
        }
    }

    /// Adds precomputed padded rows.
    pub fn add_rows(&mut self, other: &VelocityGrid) {
        for (a, b) in self.u1.iter_mut().zip(&other.u1) {
            *a += b;
        }
        for (a, b) in self.u2.iter_mut().zip(&other.u2) {
            *a += b;
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self { u1: vec![0.0; self.u1.len()], u2: vec![0.0; self.u2.len()], ..self.clone() }
    }

    pub fn max_speed(&self) -> f64 {
        self.u1.iter().zip(&self.u2).fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// Value at strip node `(i, j)`.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let k = (j + PAD) * self.n1 + i;
        [self.u1[k], self.u2[k]]
    }

    #[inline]
    pub fn eval(&self, x1: f64, x2: f64) -> [f64; 2] {
        let (cols, t1) = periodic_columns(x1, self.inv_h1, self.n1);
        let x2 = x2.clamp(-self.h2, 1.0 + 0.5 * self.h2);
        let s = x2 * self.inv_h2;
        let f = s.floor();
        let t2 = s - f;
        let j0 = (f as i64 - 1 + PAD as i64) as usize;
        let w1 = cubic_weights(t1);
        let w2 = cubic_weights(t2);
        let mut a = 0.0;
        let mut b = 0.0;
        for (r, wr) in w2.iter().enumerate() {
            let base = (j0 + r) * self.n1;
            let (ra, rb) = (&self.u1[base..base + self.n1], &self.u2[base..base + self.n1]);
            let sa = w1[0] * ra[cols[0]] + w1[1] * ra[cols[1]] + w1[2] * ra[cols[2]] + w1[3] * ra[cols[3]];
            let sb = w1[0] * rb[cols[0]] + w1[1] * rb[cols[1]] + w1[2] * rb[cols[2]] + w1[3] * rb[cols[3]];
            a += wr * sa;
            b += wr * sb;
        }
        [a, b]
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }
}

impl VelocitySource for VelocityGrid {
    fn velocity(&self, x1: f64, x2: f64) -> [f64; 2] {
        self.eval(x1, x2)
    }

    fn spacing(&self) -> f64 {
        self.h1.min(self.h2)
    }
}

/// Velocity linearly interpolated in time between two grids.
pub struct Blend<'a> {
    pub a: &'a VelocityGrid,
    pub b: &'a VelocityGrid,
    pub theta: f64,
}

impl VelocitySource for Blend<'_> {
    fn velocity(&self, x1: f64, x2: f64) -> [f64; 2] {
        let p = self.a.eval(x1, x2);
        let q = self.b.eval(x1, x2);
        [p[0] + self.theta * (q[0] - p[0]), p[1] + self.theta * (q[1] - p[1])]
    }

    fn spacing(&self) -> f64 {
        self.a.spacing()
    }
}

/// Cubic interpolation of strip values with one-sided stencils at the walls.
///
/// With `clip` the result is limited to the range of the four corners of the
/// enclosing cell.
#[inline]
pub fn interp_strip(values: &[f64], grid: &TorusGrid, x1: f64, x2: f64, clip: bool) -> f64 {
    let n1 = grid.n1();
    let last = grid.rows() - 1;
    let (cols, t1) = periodic_columns(x1, n1 as f64 / 2.0, n1);
    let s = x2.clamp(0.0, 1.0) * (grid.n2() as f64 / 2.0);
    let j = (s.floor() as usize).min(last - 1);
    let base = (j as i64 - 1).clamp(0, last as i64 - 3) as usize;
    let w2 = shifted_weights(s - base as f64);
    let w1 = cubic_weights(t1);
    let mut v = 0.0;
    for (r, wr) in w2.iter().enumerate() {
        let row = &values[(base + r) * n1..(base + r + 1) * n1];
        v += wr * (w1[0] * row[cols[0]] + w1[1] * row[cols[1]] + w1[2] * row[cols[2]] + w1[3] * row[cols[3]]);
    }
    if clip {
        let c = [
            values[j * n1 + cols[1]],
            values[j * n1 + cols[2]],
            values[(j + 1) * n1 + cols[1]],
            values[(j + 1) * n1 + cols[2]],
        ];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        v = v.clamp(lo, hi);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::grid::ParityClass;
    use std::f64::consts::PI;

    #[test]
    fn cubic_reproduces_cubic_polynomials() {
        let g = TorusGrid::strip(64, 64).unwrap();
        let p = |x: f64, y: f64| 0.3 + x * y - 2.0 * y * y * y + 0.5 * x * x * y;
        let f = ScalarField::from_fn(g, ParityClass::NONE, p).unwrap();
        for &(x, y) in &[(0.013, 0.0), (0.2, 0.001), (-0.37, 0.5), (0.1, 0.999), (0.4, 1.0)] {
            let v = interp_strip(f.values(), &g, x, y, false);
            assert!((v - p(x, y)).abs() < 1e-12, "({x}, {y})");
        }
    }

    #[test]
    fn nodes_are_reproduced_exactly() {
        let g = TorusGrid::strip(32, 32).unwrap();
        let f = ScalarField::from_fn(g, ParityClass::NONE, |x, y| (PI * x).sin() + y).unwrap();
        for j in 0..g.rows() {
            for i in 0..g.n1() {
                let v = interp_strip(f.values(), &g, g.x1(i), g.x2(j), true);
                assert_eq!(v, f.get(i, j));
            }
        }
    }

    #[test]
    fn tiny_abscissae_keep_relative_precision() {
        let g = TorusGrid::strip(32, 32).unwrap();
        let c1 = ScalarField::from_fn(g, ParityClass::NONE, |x, _| (PI * x).sin()).unwrap();
        let c2 = ScalarField::zeros(g, ParityClass::NONE);
        let v = VelocityGrid::from_strip(&VectorField::new(c1, c2).unwrap()).unwrap();
        let slope = v.eval(1e-3, 0.0)[0] / 1e-3;
        for x in [1e-8, 1e-14, 1e-20] {
            assert!((v.eval(x, 0.0)[0] / x / slope - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn padded_grid_reflects_across_walls() {
        let g = TorusGrid::strip(32, 32).unwrap();
        let c1 = ScalarField::from_fn(g, ParityClass::NONE, |x, y| (PI * x).sin() * (PI * y).cos()).unwrap();
        let c2 = ScalarField::from_fn(g, ParityClass::NONE, |x, y| (PI * x).cos() * (PI * y).sin()).unwrap();
        let v = VelocityGrid::from_strip(&VectorField::new(c1, c2).unwrap()).unwrap();
        let (x, y) = (0.31, 0.02);
        let u = v.eval(x, y);
        assert!((u[0] - (PI * x).sin() * (PI * y).cos()).abs() < 1e-4);
        assert!((u[1] - (PI * x).cos() * (PI * y).sin()).abs() < 1e-4);
        assert_eq!(v.eval(0.2, 0.0)[1], 0.0);
    }
}
