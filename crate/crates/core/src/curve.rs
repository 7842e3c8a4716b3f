//! Polygonal curves on the cylinder `T x R`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polyline with vertices in unwrapped `x1` coordinates.
///
/// A closed curve returns to its first vertex shifted by `2 * winding` in
/// `x1`. Open curves measure each segment by the shortest periodic image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCurve {
    pub vertices: Vec<(f64, f64)>,
    pub closed: bool,
    pub winding: i32,
}

fn wrap(dx: f64) -> f64 {
    dx - 2.0 * ((dx + 1.0) / 2.0).floor()
}

impl PolyCurve {
    pub fn closed(vertices: Vec<(f64, f64)>, winding: i32) -> Self {
        Self { vertices, closed: true, winding }
    }

    pub fn open(vertices: Vec<(f64, f64)>) -> Self {
        Self { vertices, closed: false, winding: 0 }
    }

    /// Horizontal line `x2 = height` winding once.
    pub fn flat(height: f64) -> Self {
        Self::closed(vec![(-1.0, height), (0.0, height)], 1)
    }

    /// Segment increments, including the closing one.
    pub fn segments(&self) -> Result<Vec<((f64, f64), (f64, f64))>> {
        let v = &self.vertices;
        if v.len() < 2 {
            return Err(Error::DegenerateCurve(format!("{} vertices", v.len())));
        }
        if v.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::NonFinite("curve vertex".into()));
        }
        let mut out = Vec::with_capacity(v.len());
        for w in v.windows(2) {
            let dx = if self.closed { w[1].0 - w[0].0 } else { wrap(w[1].0 - w[0].0) };
            out.push((w[0], (w[0].0 + dx, w[1].1)));
        }
        if self.closed {
            let (last, first) = (v[v.len() - 1], v[0]);
            out.push((last, (first.0 + 2.0 * self.winding as f64, first.1)));
        }
        Ok(out)
    }

    pub fn length(&self) -> Result<f64> {
        Ok(self
            .segments()?
            .iter()
            .map(|(a, b)| (b.0 - a.0).hypot(b.1 - a.1))
            .sum())
    }

    pub fn min_height(&self) -> f64 {
        self.vertices.iter().map(|v| v.1).fold(f64::INFINITY, f64::min)
    }

    pub fn max_height(&self) -> f64 {
        self.vertices.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `int x2 dx` over the region between `x2 = 0` and a graph-like closed curve.
    pub fn potential_energy(&self) -> Result<f64> {
        if !self.closed {
            return Err(Error::DegenerateCurve("potential energy needs a closed curve".into()));
        }
        Ok(self
            .segments()?
            .iter()
            .map(|((xa, ya), (xb, yb))| (xb - xa) * (ya * ya + ya * yb + yb * yb) / 6.0)
            .sum())
    }
}
