//! Sector integral and the remainder of the velocity decomposition
//! `u_j(x) = (-1)^j (4/pi) (Q(x) + B_j(x)) x_j`.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::interp_strip;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{DomainKind, TorusGrid};

#[inline]
fn kernel(y1: f64, y2: f64) -> f64 {
    let r2 = y1 * y1 + y2 * y2;
    y1 * y2 / (r2 * r2)
}

#[inline]
fn bilinear(values: &[f64], g: &TorusGrid, i: usize, j: usize, s: f64, t: f64) -> f64 {
    let n1 = g.n1();
    let (i1, j1) = ((i + 1) % n1, (j + 1).min(g.rows() - 1));
    let v00 = values[j * n1 + i];
    let v10 = values[j * n1 + i1];
    let v01 = values[j1 * n1 + i];
    let v11 = values[j1 * n1 + i1];
    (1.0 - t) * ((1.0 - s) * v00 + s * v10) + t * ((1.0 - s) * v01 + s * v11)
}

/// `int_{[2x1, 1] x [2x2, 1]} y1 y2 / |y|^4 omega(y) dy` by the midpoint rule.
///
/// The box is cut along grid lines; each piece is evaluated at its centre
/// with `omega` interpolated bilinearly.
pub fn q_integral(omega: &ScalarField, x: (f64, f64)) -> Result<f64> {
    let g = omega.grid();
    g.ensure_kind(DomainKind::Strip)?;
    let (lo1, lo2) = (2.0 * x.0, 2.0 * x.1);
    if !(lo1 < 1.0 && lo2 < 1.0) {
        return Err(Error::EmptyBox(format!("Q(2x) for x = ({}, {})", x.0, x.1)));
    }
    if !(x.0 > 0.0 && x.1 > 0.0) {
        return Err(Error::DegeneratePoint(x.0, x.1));
    }
    let (h1, h2) = (g.h1(), g.h2());
    let i_off = g.axis();
    let cuts = |lo: f64, h: f64| -> Vec<f64> {
        let mut c = vec![lo];
        let mut k = (lo / h).floor() as usize + 1;
        while (k as f64) * h < 1.0 {
            c.push(k as f64 * h);
            k += 1;
        }
        c.push(1.0);
        c
    };
    let c1 = cuts(lo1, h1);
    let c2 = cuts(lo2, h2);
    let v = omega.values();
    let mut total = 0.0;
    for w2 in c2.windows(2) {
        let (ya, yb) = (w2[0], w2[1]);
        let ym = 0.5 * (ya + yb);
        let j = ((ym / h2).floor() as usize).min(g.rows() - 2);
        let t = ym / h2 - j as f64;
        let mut row = 0.0;
        for w1 in c1.windows(2) {
            let xm = 0.5 * (w1[0] + w1[1]);
            let k = ((xm / h1).floor() as usize).min(g.n1() / 2 - 1);
            let s = xm / h1 - k as f64;
            row += (w1[1] - w1[0]) * kernel(xm, ym) * bilinear(v, g, i_off + k, j, s, t);
        }
        total += (yb - ya) * row;
    }
    Ok(total)
}

/// One evaluation of the decomposition at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyLemmaSample {
    pub x: (f64, f64),
    pub j: usize,
    pub u_j: f64,
    pub q_integral: f64,
    pub b_j: f64,
    /// `1 + ln(1 + x_{3-j} / x_j)`.
    pub log_term: f64,
    /// Fitted right side `C0 (|omega0|_inf log_term + sqrt K0)`; zero until a fit is applied.
    pub bound_rhs: f64,
}

impl KeyLemmaSample {
    fn sign(j: usize) -> f64 {
        if j % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `(-1)^j (4/pi) (Q + B_j) x_j`.
    pub fn reassembled(&self) -> f64 {
        let xj = if self.j == 1 { self.x.0 } else { self.x.1 };
        Self::sign(self.j) * (4.0 / PI) * (self.q_integral + self.b_j) * xj
    }
}

/// `B_j = (-1)^j (pi/4) u_j(x) / x_j - Q(x)`, with `u_j` interpolated from the strip field.
pub fn extract_b(omega: &ScalarField, u: &VectorField, x: (f64, f64), j: usize) -> Result<KeyLemmaSample> {
    if j != 1 && j != 2 {
        return Err(Error::InvalidSpec(format!("component index {j}")));
    }
    let g = u.grid();
    g.ensure_kind(DomainKind::Strip)?;
    let (xj, xo) = if j == 1 { (x.0, x.1) } else { (x.1, x.0) };
    if xj < 2.0 * g.h1().max(g.h2()) || xo <= 0.0 {
        return Err(Error::DegeneratePoint(x.0, x.1));
    }
    let c = if j == 1 { &u.c1 } else { &u.c2 };
    let u_j = interp_strip(c.values(), g, x.0, x.1, false);
    let q = q_integral(omega, x)?;
    let b_j = KeyLemmaSample::sign(j) * (PI / 4.0) * u_j / xj - q;
    Ok(KeyLemmaSample {
        x,
        j,
        u_j,
        q_integral: q,
        b_j,
        log_term: 1.0 + (1.0 + xo / xj).ln(),
        bound_rhs: 0.0,
    })
}

/// Smallest constants making the remainder bound hold on every sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderFit {
    /// Joint constant for `|omega0|_inf log_term + sqrt K0`.
    pub c0: f64,
    /// Constant using the vorticity term alone.
    pub c0_vorticity: f64,
    /// Constant using the energy term alone; infinite when `K0 = 0` and some `B != 0`.
    pub c0_energy: f64,
    pub samples: usize,
    /// `max / min` of `x_{3-j} / x_j` over the samples.
    pub ratio_span: f64,
}

pub fn fit_remainder_constant(samples: &[KeyLemmaSample], omega0_inf: f64, k0: f64) -> Result<RemainderFit> {
    if samples.len() < 20 {
        return Err(Error::InsufficientSamples(format!("{} key-lemma samples, need 20", samples.len())));
    }
    let ratios = samples.iter().map(|s| (s.log_term - 1.0).exp() - 1.0);
    let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r), b.max(r)));
    let span = hi / lo;
    if !(span >= 10.0) {
        return Err(Error::InsufficientSamples(format!("ratio span {span:.2} is below a decade")));
    }
    let sk = k0.max(0.0).sqrt();
    let worst = |den: &dyn Fn(&KeyLemmaSample) -> f64| {
        samples.iter().fold(0.0f64, |m, s| {
            let b = s.b_j.abs();
            if b == 0.0 {
                m
            } else {
                m.max(b / den(s))
            }
        })
    };
    Ok(RemainderFit {
        c0: worst(&|s| omega0_inf * s.log_term + sk),
        c0_vorticity: worst(&|s| omega0_inf * s.log_term),
        c0_energy: worst(&|_| sk),
        samples: samples.len(),
        ratio_span: span,
    })
}

/// Fills `bound_rhs` from a fitted constant.
pub fn apply_bound(samples: &mut [KeyLemmaSample], c0: f64, omega0_inf: f64, k0: f64) {
    for s in samples {
        s.bound_rhs = c0 * (omega0_inf * s.log_term + k0.max(0.0).sqrt());
    }
}

/// Seeded points in `B_{1/2}` of the first quadrant with both coordinates at
/// least `2h` and `x2 / x1` log-uniform in `[1/20, 20]`.
pub fn sample_points(grid: &TorusGrid, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = 2.0 * grid.h1().max(grid.h2());
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let ratio = (rng.gen_range(-1.0..1.0) * 20f64.ln()).exp();
        let r = (rng.gen_range(0.0..1.0) * (0.49f64 / (4.0 * floor)).ln()).exp() * 4.0 * floor;
        let theta = ratio.atan();
        let p = (r * theta.cos(), r * theta.sin());
        if p.0 >= floor && p.1 >= floor && p.0 < 0.5 && p.1 < 0.5 {
            out.push(p);
        }
    }
    out
}

/// Samples for both components at each point.
pub fn key_lemma_table(omega: &ScalarField, u: &VectorField, points: &[(f64, f64)]) -> Result<Vec<KeyLemmaSample>> {
    let mut out = Vec::with_capacity(2 * points.len());
    for &p in points {
        for j in [1, 2] {
            out.push(extract_b(omega, u, p, j)?);
        }
    }
    Ok(out)
}
