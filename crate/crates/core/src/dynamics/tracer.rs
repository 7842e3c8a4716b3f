//! Lagrangian tracers.

use serde::{Deserialize, Serialize};

use crate::dynamics::interp::VelocitySource;
use crate::error::{Error, Result};

/// Slack allowed outside `[0, 1]` in `x2` before a tracer counts as lost.
const WALL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tracer {
    pub label: String,
    pub position: (f64, f64),
    /// `(t, x1, x2)` at every recorded time.
    pub history: Vec<(f64, f64, f64)>,
    /// Started on `x2 = 0`; such tracers never leave the wall.
    pub bottom: bool,
}

impl Tracer {
    pub fn new(label: impl Into<String>, x0: (f64, f64), t0: f64) -> Result<Self> {
        if !(x0.1 >= 0.0 && x0.1 <= 1.0 && x0.0.is_finite()) {
            return Err(Error::OutOfDomain(x0.0, x0.1));
        }
        Ok(Self {
            label: label.into(),
            position: x0,
            history: vec![(t0, x0.0, x0.1)],
            bottom: x0.1 == 0.0,
        })
    }

    /// One RK3 step from the velocity `a` at `t` to `b` at `t + dt`,
    /// linear in time between them.
    pub fn advance<A: VelocitySource, B: VelocitySource>(
        &mut self,
        a: &A,
        b: &B,
        t: f64,
        dt: f64,
    ) -> Result<()> {
        let (x1, x2) = self.position;
        let mid = |x: f64, y: f64| {
            let p = a.velocity(x, y);
            let q = b.velocity(x, y);
            [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
        };
        let k1 = a.velocity(x1, x2);
        let k2 = mid(x1 + 0.5 * dt * k1[0], x2 + 0.5 * dt * k1[1]);
        let k3 = b.velocity(x1 + dt * (2.0 * k2[0] - k1[0]), x2 + dt * (2.0 * k2[1] - k1[1]));
        let mut y1 = x1 + dt / 6.0 * (k1[0] + 4.0 * k2[0] + k3[0]);
        let mut y2 = x2 + dt / 6.0 * (k1[1] + 4.0 * k2[1] + k3[1]);
        if self.bottom {
            y2 = 0.0;
        }
        if !(y1.is_finite() && y2 >= -WALL_SLACK && y2 <= 1.0 + WALL_SLACK) {
            return Err(Error::OutOfDomain(y1, y2));
        }
        y2 = y2.clamp(0.0, 1.0);
        y1 -= 2.0 * ((y1 + 1.0) / 2.0).floor();
        self.position = (y1, y2);
        self.history.push((t + dt, y1, y2));
        Ok(())
    }
}

/// Integrates a tracer through a sequence of `(t, velocity)` frames.
pub fn trace<S: VelocitySource>(frames: &[(f64, S)], x0: (f64, f64)) -> Result<Tracer> {
    let t0 = frames.first().map_or(0.0, |f| f.0);
    let mut tr = Tracer::new("tracer", x0, t0)?;
    for w in frames.windows(2) {
        tr.advance(&w[0].1, &w[1].1, w[0].0, w[1].0 - w[0].0)?;
    }
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_velocity_keeps_position() {
        let z = |_: f64, _: f64| [0.0, 0.0];
        let frames: Vec<(f64, _)> = (0..5).map(|k| (k as f64 * 0.1, z)).collect();
        let tr = trace(&frames, (0.3, 0.4)).unwrap();
        assert!(tr.history.iter().all(|h| h.1 == 0.3 && h.2 == 0.4));
    }

    #[test]
    fn linear_contraction_is_exponential() {
        let eps = 0.5;
        let u = move |x: f64, _: f64| [-eps * x, 0.0];
        let dt = 0.02;
        let frames: Vec<(f64, _)> = (0..=500).map(|k| (k as f64 * dt, u)).collect();
        let tr = trace(&frames, (0.1, 0.0)).unwrap();
        assert!(tr.bottom);
        for &(t, x1, x2) in &tr.history {
            assert!((x1 - 0.1 * (-eps * t).exp()).abs() < 1e-6 * 0.1);
            assert_eq!(x2, 0.0);
        }
    }

    #[test]
    fn leaving_the_strip_is_reported() {
        let up = |_: f64, _: f64| [0.0, 1.0];
        let frames = vec![(0.0, up), (1.0, up)];
        assert!(matches!(trace(&frames, (0.0, 0.5)), Err(Error::OutOfDomain(_, _))));
    }
}
