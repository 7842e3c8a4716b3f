//! Extremal horizontal velocities and the bracket pair `a(t) < b(t)`.

use serde::{Deserialize, Serialize};

use crate::dynamics::interp::VelocitySource;
use crate::error::{Error, Result};

/// Bisection depth around the best sample of the segment scan.
pub const REFINE_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Min,
    Max,
}

impl Side {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Side::Min => a < b,
            Side::Max => a > b,
        }
    }
}

/// Extremum of `u1(x1, x2)` over `0 <= x2 <= x1`.
pub fn extremal_u1<S: VelocitySource>(src: &S, x1: f64, side: Side) -> Result<f64> {
    extremal_u1_with(src, x1, side, REFINE_LEVELS)
}

pub fn extremal_u1_with<S: VelocitySource>(src: &S, x1: f64, side: Side, levels: usize) -> Result<f64> {
    if !(x1 > 0.0 && x1 < 1.0) {
        return Err(Error::DegenerateAbscissa(x1));
    }
    let k = ((x1 / src.spacing()).ceil() as usize).max(4);
    let step = x1 / k as f64;
    let mut best_y = 0.0;
    let mut best = src.u1(x1, 0.0);
    for m in 1..=k {
        let y = if m == k { x1 } else { m as f64 * step };
        let v = src.u1(x1, y);
        if side.better(v, best) {
            best = v;
            best_y = y;
        }
    }
    let mut s = step;
    for _ in 0..levels {
        s *= 0.5;
        let centre = best_y;
        for y in [centre - s, centre + s] {
            if (0.0..=x1).contains(&y) {
                let v = src.u1(x1, y);
                if side.better(v, best) {
                    best = v;
                    best_y = y;
                }
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketSample {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketState {
    pub a: f64,
    pub b: f64,
    pub t: f64,
    pub history: Vec<BracketSample>,
    /// Steps at which `2a < b` failed.
    pub ordering_violations: usize,
}

impl BracketState {
    pub fn new(a: f64, b: f64, t: f64) -> Result<Self> {
        if !(0.0 < a && a < b && b < 1.0) {
            return Err(Error::BracketCollapse { a, b });
        }
        let mut s = Self { a, b, t, history: Vec::new(), ordering_violations: 0 };
        s.record();
        Ok(s)
    }

    fn record(&mut self) {
        if 2.0 * self.a >= self.b {
            self.ordering_violations += 1;
        }
        self.history.push(BracketSample { t: self.t, a: self.a, b: self.b, log_ratio: (self.b / self.a).ln() });
    }

    pub fn log_ratio(&self) -> f64 {
        (self.b / self.a).ln()
    }
}

fn heun<A: VelocitySource, B: VelocitySource>(a: f64, b: f64, now: &A, next: &B, dt: f64) -> Result<(f64, f64)> {
    let fa = extremal_u1(now, a, Side::Max)?;
    let fb = extremal_u1(now, b, Side::Min)?;
    let (pa, pb) = (a + dt * fa, b + dt * fb);
    if !(pa > 0.0 && pb > pa) {
        return Err(Error::BracketCollapse { a: pa, b: pb });
    }
    let ga = extremal_u1(next, pa, Side::Max)?;
    let gb = extremal_u1(next, pb, Side::Min)?;
    let (a, b) = (a + 0.5 * dt * (fa + ga), b + 0.5 * dt * (fb + gb));
    if !(a > 0.0 && b > a && b < 1.0) {
        return Err(Error::BracketCollapse { a, b });
    }
    Ok((a, b))
}

/// Heun step of `a' = max u1(a, .)`, `b' = min u1(b, .)` from velocity `now`
/// at `t` to `next` at `t + dt`.
pub fn bracket_step<A: VelocitySource, B: VelocitySource>(
    state: &BracketState,
    now: &A,
    next: &B,
    dt: f64,
) -> Result<BracketState> {
    let mut out = state.clone();
    out.advance(now, next, dt)?;
    Ok(out)
}

impl BracketState {
    /// In-place [`bracket_step`].
    pub fn advance<A: VelocitySource, B: VelocitySource>(&mut self, now: &A, next: &B, dt: f64) -> Result<()> {
        let (a, b) = heun(self.a, self.b, now, next, dt)?;
        self.a = a;
        self.b = b;
        self.t += dt;
        self.record();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_strain_extremals() {
        let u = |x: f64, _: f64| [-0.5 * x, 0.0];
        assert_eq!(extremal_u1(&u, 0.2, Side::Min).unwrap(), -0.1);
        assert_eq!(extremal_u1(&u, 0.2, Side::Max).unwrap(), -0.1);
    }

    #[test]
    fn monotone_in_x2() {
        let u = |x: f64, y: f64| [-x * (1.0 + y), 0.0];
        let x = 0.3;
        assert!((extremal_u1(&u, x, Side::Min).unwrap() + x * (1.0 + x)).abs() < 1e-15);
        assert_eq!(extremal_u1(&u, x, Side::Max).unwrap(), -x);
    }

    #[test]
    fn abscissa_outside_unit_interval() {
        let u = |_: f64, _: f64| [0.0, 0.0];
        assert!(matches!(extremal_u1(&u, 0.0, Side::Min), Err(Error::DegenerateAbscissa(_))));
        assert!(matches!(extremal_u1(&u, 1.0, Side::Min), Err(Error::DegenerateAbscissa(_))));
    }

    #[test]
    fn bracket_follows_linear_strain() {
        let eps = 0.5;
        let u = move |x: f64, _: f64| [-eps * x, 0.0];
        let (kappa, m) = (0.05f64, 2);
        let mut s = BracketState::new(kappa.powi(m), kappa, 0.0).unwrap();
        let dt = 0.01;
        for _ in 0..1000 {
            s.advance(&u, &u, dt).unwrap();
        }
        let decay = (-eps * s.t).exp();
        assert!((s.a / (kappa.powi(m) * decay) - 1.0).abs() < 1e-4);
        assert!((s.b / (kappa * decay) - 1.0).abs() < 1e-4);
        assert_eq!(s.history.len(), 1001);
        assert_eq!(s.ordering_violations, 0);
    }

    #[test]
    fn crossing_brackets_collapse() {
        let u = |x: f64, _: f64| [if x > 0.1 { -10.0 } else { 0.0 }, 0.0];
        let s = BracketState::new(0.09, 0.11, 0.0).unwrap();
        assert!(matches!(bracket_step(&s, &u, &u, 0.01), Err(Error::BracketCollapse { .. })));
    }
}
