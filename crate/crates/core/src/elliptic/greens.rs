//! Lattice-sum Newtonian potential, independent of the FFT path.
//!
//! The periodic potential on the doubled torus is the square-ordered sum of
//! `(1/2pi) ln|x - y - 2n|` against the field over all images `n`. The
//! `|n|_inf <= 1` images are integrated directly; the rest use a multipole
//! expansion about each image centre, and the images beyond `lattice_n` are
//! added back through an integral estimate of the remaining lattice sum.
//!
//! For fields odd in both coordinates the square-ordered sum equals the
//! zero-mean periodic solution. Other fields differ by an affine function.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{DomainKind, TorusGrid};
use crate::quad::{gauss_on, log_rect};

/// How the field is represented between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreensRule {
    /// Node values on node-centred cells.
    Midpoint,
    /// Piecewise bicubic Lagrange interpolant, 4x4 Gauss points per cell.
    Bicubic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensOptions {
    pub rule: GreensRule,
    /// Integrate the log kernel exactly on cells next to the evaluation point.
    pub singular_correction: bool,
    /// Add the estimate of images beyond the truncation square.
    pub tail_correction: bool,
    /// Number of multipole terms.
    pub order: usize,
}

impl Default for GreensOptions {
    fn default() -> Self {
        Self { rule: GreensRule::Bicubic, singular_correction: true, tail_correction: true, order: 48 }
    }
}

impl GreensOptions {
    /// Midpoint rule with the exact singular cell and no tail estimate.
    pub fn midpoint() -> Self {
        Self { rule: GreensRule::Midpoint, tail_correction: false, ..Self::default() }
    }
}

const GAUSS: usize = 4;
const NEAR_GAUSS: usize = 8;

/// Precomputed quadrature of one field, reusable across points.
pub struct GreensOracle {
    grid: TorusGrid,
    values: Vec<f64>,
    opts: GreensOptions,
    /// Quadrature points `(y1, y2, weight * omega)` with cells stored contiguously.
    points: Vec<[f64; 3]>,
    per_cell: usize,
    moments: Vec<Complex64>,
}

fn lagrange4(t: f64) -> [f64; 4] {
    // nodes at -1, 0, 1, 2
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

impl GreensOracle {
    pub fn new(omega: &ScalarField, opts: GreensOptions) -> Result<Self> {
        omega.grid().ensure_kind(DomainKind::DoubledTorus)?;
        let mean = omega.mean();
        let tol = crate::elliptic::poisson::MEAN_TOL * omega.linf().max(1.0);
        if mean.abs() > tol {
            return Err(Error::NonzeroMean { mean, tol });
        }
        if opts.order < 2 {
            return Err(Error::InvalidSpec("multipole order must be at least 2".into()));
        }
        let grid = *omega.grid();
        let (n1, n2) = (grid.n1(), grid.n2());
        let (h1, h2) = (grid.h1(), grid.h2());
        let values = omega.values().to_vec();
        let mut points = Vec::new();
        let per_cell = match opts.rule {
            GreensRule::Midpoint => {
                for j in 0..n2 {
                    for i in 0..n1 {
                        points.push([grid.x1(i), grid.x2(j), h1 * h2 * values[j * n1 + i]]);
                    }
                }
                1
            }
            GreensRule::Bicubic => {
                let g = gauss_on(0.0, 1.0, GAUSS);
                let wts: Vec<[f64; 4]> = g.iter().map(|(t, _)| lagrange4(*t)).collect();
                for j in 0..n2 {
                    for i in 0..n1 {
                        let st = stencil(&grid, &values, i, j);
                        for (b, (tb, wb)) in g.iter().enumerate() {
                            for (a, (ta, wa)) in g.iter().enumerate() {
                                let mut p = 0.0;
                                for (r, row) in st.iter().enumerate() {
                                    let mut s = 0.0;
                                    for c in 0..4 {
                                        s += wts[a][c] * row[c];
                                    }
                                    p += wts[b][r] * s;
                                }
                                points.push([
                                    grid.x1(i) + ta * h1,
                                    grid.x2(j) + tb * h2,
                                    wa * wb * h1 * h2 * p,
                                ]);
                            }
                        }
                    }
                }
                GAUSS * GAUSS
            }
        };
        let mut moments = vec![Complex64::new(0.0, 0.0); opts.order + 1];
        for p in &points {
            let y = Complex64::new(p[0], p[1]);
            let mut pw = Complex64::new(p[2], 0.0);
            for m in moments.iter_mut() {
                *m += pw;
                pw *= y;
            }
        }
        Ok(Self { grid, values, opts, points, per_cell, moments })
    }

    /// Complex moments `int y^k omega(y) dy` of the quadrature representation.
    pub fn moments(&self) -> &[Complex64] {
        &self.moments
    }

    /// Bicubic interpolant of cell `(i, j)` extended as a polynomial to `(x1, x2)`.
    fn cell_poly(&self, i: usize, j: usize, x1: f64, x2: f64) -> f64 {
        let g = &self.grid;
        let wa = lagrange4((x1 - g.x1(i)) / g.h1());
        let wb = lagrange4((x2 - g.x2(j)) / g.h2());
        let st = stencil(g, &self.values, i, j);
        let mut p = 0.0;
        for r in 0..4 {
            let mut s = 0.0;
            for c in 0..4 {
                s += wa[c] * st[r][c];
            }
            p += wb[r] * s;
        }
        p
    }

    /// Direct integral over the 3x3 block of images around the base cell.
    fn near_field(&self, x1: f64, x2: f64) -> Result<f64> {
        let g = &self.grid;
        let (h1, h2) = (g.h1(), g.h2());
        let (n1, n2) = (g.n1(), g.n2());
        let mut total = 0.0;
        for s2 in -1i32..=1 {
            for s1 in -1i32..=1 {
                // evaluation point relative to this image of the base cell
                let (p1, p2) = (x1 - 2.0 * s1 as f64, x2 - 2.0 * s2 as f64);
                if p1 < -1.0 - 2.0 * h1 || p1 > 1.0 + 2.0 * h1 || p2 < -1.0 - 2.0 * h2 || p2 > 1.0 + 2.0 * h2 {
                    total += self.smooth_sum(p1, p2, 0..self.points.len());
                    continue;
                }
                for j in 0..n2 {
                    for i in 0..n1 {
                        let c = j * n1 + i;
                        let range = c * self.per_cell..(c + 1) * self.per_cell;
                        let (lo1, lo2) = match self.opts.rule {
                            GreensRule::Midpoint => (g.x1(i) - 0.5 * h1, g.x2(j) - 0.5 * h2),
                            GreensRule::Bicubic => (g.x1(i), g.x2(j)),
                        };
                        let near = match self.opts.rule {
                            GreensRule::Midpoint => {
                                p1 >= lo1 && p1 <= lo1 + h1 && p2 >= lo2 && p2 <= lo2 + h2
                            }
                            GreensRule::Bicubic => {
                                p1 >= lo1 - h1 && p1 <= lo1 + 2.0 * h1 && p2 >= lo2 - h2 && p2 <= lo2 + 2.0 * h2
                            }
                        };
                        if !near || !self.opts.singular_correction {
                            let v = self.smooth_sum(p1, p2, range);
                            if !v.is_finite() {
                                return Err(Error::SingularPoint(x1, x2));
                            }
                            total += v;
                            continue;
                        }
                        total += match self.opts.rule {
                            GreensRule::Midpoint => {
                                self.values[c] * log_rect(lo1 - p1, lo1 + h1 - p1, lo2 - p2, lo2 + h2 - p2)
                            }
                            GreensRule::Bicubic => self.near_cell(i, j, p1, p2),
                        };
                    }
                }
            }
        }
        Ok(total)
    }

    fn smooth_sum(&self, p1: f64, p2: f64, range: std::ops::Range<usize>) -> f64 {
        let mut s = 0.0;
        for q in &self.points[range] {
            let (d1, d2) = (p1 - q[0], p2 - q[1]);
            s += q[2] * (d1 * d1 + d2 * d2).ln();
        }
        0.5 * s
    }

    /// Singularity subtraction on one bicubic cell.
    fn near_cell(&self, i: usize, j: usize, p1: f64, p2: f64) -> f64 {
        let g = &self.grid;
        let (lo1, lo2) = (g.x1(i), g.x2(j));
        let (hi1, hi2) = (lo1 + g.h1(), lo2 + g.h2());
        let px = self.cell_poly(i, j, p1, p2);
        let mut total = px * log_rect(lo1 - p1, hi1 - p1, lo2 - p2, hi2 - p2);
        let split = |lo: f64, hi: f64, p: f64| {
            if p > lo && p < hi {
                vec![(lo, p), (p, hi)]
            } else {
                vec![(lo, hi)]
            }
        };
        for (a1, b1) in split(lo1, hi1, p1) {
            for (a2, b2) in split(lo2, hi2, p2) {
                for (y1, w1) in gauss_on(a1, b1, NEAR_GAUSS) {
                    for (y2, w2) in gauss_on(a2, b2, NEAR_GAUSS) {
                        let (d1, d2) = (p1 - y1, p2 - y2);
                        let r2 = d1 * d1 + d2 * d2;
                        total += w1 * w2 * (self.cell_poly(i, j, y1, y2) - px) * 0.5 * r2.ln();
                    }
                }
            }
        }
        total
    }

    /// Multipole sum over images with `2 <= |n|_inf <= lattice_n`.
    fn far_field(&self, x: Complex64, lattice_n: usize) -> f64 {
        let big = lattice_n as i64;
        let mut total = 0.0;
        for a in -big..=big {
            for b in -big..=big {
                if a.abs().max(b.abs()) < 2 {
                    continue;
                }
                let w = x - Complex64::new(2.0 * a as f64, 2.0 * b as f64);
                let u = w.inv();
                let mut s = Complex64::new(0.0, 0.0);
                for k in (1..self.moments.len()).rev() {
                    s = (s + self.moments[k] / k as f64) * u;
                }
                total -= s.re;
            }
        }
        total
    }

    /// Integral estimate of the images with `|n|_inf > lattice_n`, already divided by `2 pi`.
    fn tail(&self, x: Complex64, lattice_n: usize) -> f64 {
        let l = (2 * lattice_n + 1) as f64;
        let kmax = self.moments.len() - 1;
        let pmax = kmax + 48;
        let ap: Vec<f64> = (0..=pmax).map(|p| if p % 4 == 0 && p >= 4 { a_coeff(p) } else { 0.0 }).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for k in 1..=kmax {
            let mut e = Complex64::new(0.0, 0.0);
            let mut binom = 1.0; // C(m + k - 1, m)
            let mut xm = Complex64::new(1.0, 0.0);
            for m in 0..=(pmax - k) {
                if m > 0 {
                    binom *= (m + k - 1) as f64 / m as f64;
                    xm *= x;
                }
                let p = k + m;
                if ap[p] != 0.0 {
                    e += xm * (binom * ap[p] * l.powi(2 - p as i32) / (p as f64 - 2.0));
                }
            }
            if k % 2 == 1 {
                e = -e;
            }
            total += self.moments[k] / k as f64 * e;
        }
        -total.re / (8.0 * PI)
    }

    /// Potential at `x` using images with `|n|_inf <= lattice_n`.
    pub fn eval(&self, x: (f64, f64), lattice_n: usize) -> Result<f64> {
        let (x1, x2) = x;
        if !(x1.is_finite() && x2.is_finite()) {
            return Err(Error::NonFinite("evaluation point".into()));
        }
        // reduce into the base cell
        let x1 = (x1 + 1.0).rem_euclid(2.0) - 1.0;
        let x2 = (x2 + 1.0).rem_euclid(2.0) - 1.0;
        let z = Complex64::new(x1, x2);
        let mut total = self.near_field(x1, x2)?;
        if lattice_n >= 2 {
            total += self.far_field(z, lattice_n);
        }
        let mut psi = total / (2.0 * PI);
        if self.opts.tail_correction {
            psi += self.tail(z, lattice_n.max(1));
        }
        Ok(psi)
    }
}

/// `4 int_{-pi/4}^{pi/4} cos(p t) cos(t)^(p-2) dt`.
pub fn a_coeff(p: usize) -> f64 {
    let rule = gauss_on(-PI / 4.0, PI / 4.0, 64);
    4.0 * rule
        .iter()
        .map(|(t, w)| w * (p as f64 * t).cos() * t.cos().powi(p as i32 - 2))
        .sum::<f64>()
}

fn stencil(g: &TorusGrid, v: &[f64], i: usize, j: usize) -> [[f64; 4]; 4] {
    let (n1, n2) = (g.n1(), g.n2());
    let mut st = [[0.0; 4]; 4];
    for (r, row) in st.iter_mut().enumerate() {
        let jj = (j + n2 + r - 1) % n2;
        for (c, s) in row.iter_mut().enumerate() {
            let ii = (i + n1 + c - 1) % n1;
            *s = v[jj * n1 + ii];
        }
    }
    st
}

/// Potential of a doubled-torus field at one point with default options.
pub fn greens_point_eval(omega: &ScalarField, x: (f64, f64), lattice_n: usize) -> Result<f64> {
    GreensOracle::new(omega, GreensOptions::default())?.eval(x, lattice_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ParityClass;

    fn eigen(n: usize) -> ScalarField {
        let g = TorusGrid::doubled(n, n).unwrap();
        ScalarField::from_fn(g, ParityClass::ODD_ODD, |x, y| (PI * x).sin() * (PI * y).sin()).unwrap()
    }

    #[test]
    fn a4_is_two_thirds() {
        assert!((a_coeff(4) - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenfunction_potential_at_quarter_point() {
        let w = eigen(64);
        let oracle = GreensOracle::new(&w, GreensOptions::default()).unwrap();
        let v = oracle.eval((0.25, 0.25), 16).unwrap();
        let exact = -(PI / 4.0).sin().powi(2) / (2.0 * PI * PI);
        assert!((v - exact).abs() < 1e-6, "{v} vs {exact}");
    }

    #[test]
    fn midpoint_without_correction_rejects_nodes() {
        let w = eigen(16);
        let opts = GreensOptions { singular_correction: false, ..GreensOptions::midpoint() };
        let oracle = GreensOracle::new(&w, opts).unwrap();
        assert!(matches!(oracle.eval((0.25, 0.25), 2), Err(Error::SingularPoint(..))));
    }

    #[test]
    fn nonzero_mean_rejected() {
        let g = TorusGrid::doubled(16, 16).unwrap();
        let w = ScalarField::from_fn(g, ParityClass::NONE, |_, _| 1.0).unwrap();
        assert!(GreensOracle::new(&w, GreensOptions::default()).is_err());
    }
}
