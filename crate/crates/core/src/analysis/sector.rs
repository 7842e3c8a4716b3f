//! Lower bound of the sector integral near the origin and the sign
//! structure of the velocity there.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::keylemma::q_integral;
use crate::dynamics::VelocitySource;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::initdata::exceptional_area;

/// `(epsilon pi / 48) (ln(1/delta) - 2 ln 4)`.
pub fn sector_floor(epsilon: f64, delta: f64) -> f64 {
    epsilon * PI / 48.0 * ((1.0 / delta).ln() - 2.0 * 4f64.ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorCheck {
    /// Area of `{|omega - epsilon| > tol epsilon}` in the unit square.
    pub exceptional_area: f64,
    /// `exceptional_area <= 2 delta`; the bound is only claimed then.
    pub applicable: bool,
    pub floor: f64,
    pub min_q: f64,
    pub points: usize,
    /// Applicable and every sampled `Q` at least `floor - rel_tol |floor|`.
    pub pass: bool,
}

/// Seeded points of `B_delta` in the open first quadrant.
pub fn ball_points(delta: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = delta * rng.gen_range(0.0f64..1.0).sqrt().max(1e-6);
            let th = rng.gen_range(0.0..PI / 2.0);
            (r * th.cos().max(1e-9), r * th.sin().max(1e-9))
        })
        .collect()
}

pub fn sector_lower_bound_check(
    omega: &ScalarField,
    epsilon: f64,
    delta: f64,
    omega_tol: f64,
    points: &[(f64, f64)],
    rel_tol: f64,
) -> Result<SectorCheck> {
    if points.is_empty() {
        return Err(Error::InsufficientSamples("no sample points".into()));
    }
    let area = exceptional_area(omega, epsilon, omega_tol);
    let floor = sector_floor(epsilon, delta);
    let mut min_q = f64::INFINITY;
    for &p in points {
        if p.0 * p.0 + p.1 * p.1 >= delta * delta {
            return Err(Error::OutOfDomain(p.0, p.1));
        }
        min_q = min_q.min(q_integral(omega, p)?);
    }
    let applicable = area <= 2.0 * delta;
    Ok(SectorCheck {
        exceptional_area: area,
        applicable,
        floor,
        min_q,
        points: points.len(),
        pass: applicable && min_q >= floor - rel_tol * floor.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSigns {
    /// `min -u1 / (epsilon x1)` over nodes of `B_delta` with `0 < x2 <= x1`.
    pub min_u1_ratio: f64,
    /// `min u2 / (epsilon x2)` over diagonal points of `B_delta`.
    pub min_u2_diagonal: f64,
}

/// Samples on the grid `h k` inside `B_delta`.
pub fn sector_signs<S: VelocitySource>(u: &S, epsilon: f64, delta: f64, h: f64) -> Result<SectorSigns> {
    let kmax = (delta / h).ceil() as usize;
    let (mut r1, mut r2) = (f64::INFINITY, f64::INFINITY);
    for k1 in 1..=kmax {
        let x1 = k1 as f64 * h;
        for k2 in 0..=k1 {
            let x2 = k2 as f64 * h;
            if x1 * x1 + x2 * x2 >= delta * delta {
                break;
            }
            let v = u.velocity(x1, x2);
            r1 = r1.min(-v[0] / (epsilon * x1));
            if k2 == k1 {
                r2 = r2.min(v[1] / (epsilon * x2));
            }
        }
    }
    if !r1.is_finite() || !r2.is_finite() {
        return Err(Error::EmptyRegion(format!("no sample points in B_{delta} at spacing {h}")));
    }
    Ok(SectorSigns { min_u1_ratio: r1, min_u2_diagonal: r2 })
}
