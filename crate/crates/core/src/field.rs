//! Sampled scalar and vector fields with parity tags.

use crate::error::{Error, Result};
use crate::grid::{DomainKind, Parity, ParityClass, TorusGrid};

/// Grid function with a declared reflection parity.
///
/// Values are stored row-major, `values[j * n1 + i]`, and are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<f64>,
    parity: ParityClass,
}

/// Largest forward-difference gradient magnitude on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientSup {
    pub value: f64,
    pub x1: f64,
    pub x2: f64,
    pub h: f64,
}

impl ScalarField {
    pub fn new(grid: TorusGrid, values: Vec<f64>, parity: ParityClass) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field".into()));
        }
        Ok(Self { grid, values, parity })
    }

    pub(crate) fn from_parts(grid: TorusGrid, values: Vec<f64>, parity: ParityClass) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, parity }
    }

    pub fn zeros(grid: TorusGrid, parity: ParityClass) -> Self {
        Self { grid, values: vec![0.0; grid.len()], parity }
    }

    pub fn from_fn(
        grid: TorusGrid,
        parity: ParityClass,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.rows() {
            let x2 = grid.x2(j);
            for i in 0..grid.n1() {
                values.push(f(grid.x1(i), x2));
            }
        }
        Self::new(grid, values, parity)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn parity(&self) -> ParityClass {
        self.parity
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn with_parity(mut self, parity: ParityClass) -> Self {
        self.parity = parity;
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            parity: self.parity,
        }
    }

    /// Largest deviation from the declared parity in `x1`.
    pub fn parity_violation_x1(&self) -> f64 {
        let Some(s) = self.parity.x1.sign() else { return 0.0 };
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for j in 0..g.rows() {
            let row = &self.values[j * g.n1()..(j + 1) * g.n1()];
            for i in 0..g.n1() {
                worst = worst.max((row[i] - s * row[g.mirror1(i)]).abs());
            }
        }
        worst
    }

    /// Largest deviation from the declared parity in `x2`.
    ///
    /// On the strip only the wall rows carry a constraint: an odd field must
    /// vanish there.
    pub fn parity_violation_x2(&self) -> f64 {
        let Some(s) = self.parity.x2.sign() else { return 0.0 };
        let g = &self.grid;
        let n1 = g.n1();
        match g.kind() {
            DomainKind::DoubledTorus => {
                let mut worst: f64 = 0.0;
                for j in 0..g.rows() {
                    let m = g.mirror2(j);
                    for i in 0..n1 {
                        let d = self.values[j * n1 + i] - s * self.values[m * n1 + i];
                        worst = worst.max(d.abs());
                    }
                }
                worst
            }
            DomainKind::Strip => {
                if s > 0.0 {
                    return 0.0;
                }
                let last = g.rows() - 1;
                let mut worst: f64 = 0.0;
                for j in [0, last] {
                    for i in 0..n1 {
                        worst = worst.max(2.0 * self.values[j * n1 + i].abs());
                    }
                }
                worst
            }
        }
    }

    pub fn parity_violation(&self) -> f64 {
        self.parity_violation_x1().max(self.parity_violation_x2())
    }

    /// Projects onto the declared parity class by averaging with reflections.
    pub fn symmetrize(&mut self) {
        symmetrize_values(&self.grid, self.parity, &mut self.values);
    }

    pub fn symmetrized(mut self) -> Self {
        self.symmetrize();
        self
    }

    /// Mean value; trapezoid weights across the strip.
    pub fn mean(&self) -> f64 {
        let g = &self.grid;
        match g.kind() {
            DomainKind::DoubledTorus => self.values.iter().sum::<f64>() / self.values.len() as f64,
            DomainKind::Strip => {
                let n1 = g.n1();
                let last = g.rows() - 1;
                let mut s = 0.0;
                for j in 0..g.rows() {
                    let w = if j == 0 || j == last { 0.5 } else { 1.0 };
                    s += w * self.values[j * n1..(j + 1) * n1].iter().sum::<f64>();
                }
                s / (n1 * last) as f64
            }
        }
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `L^p` norm on the underlying domain (area 4 for the torus, 2 for the strip).
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.linf();
        }
        let g = &self.grid;
        let n1 = g.n1();
        let cell = g.h1() * g.h2();
        let last = g.rows() - 1;
        let mut s = 0.0;
        for j in 0..g.rows() {
            let w = match g.kind() {
                DomainKind::Strip if j == 0 || j == last => 0.5,
                _ => 1.0,
            };
            let row: f64 = self.values[j * n1..(j + 1) * n1]
                .iter()
                .map(|v| v.abs().powf(p))
                .sum();
            s += w * row;
        }
        (s * cell).powf(1.0 / p)
    }

    /// Largest forward-difference gradient magnitude.
    pub fn grad_sup(&self) -> GradientSup {
        let g = &self.grid;
        let (n1, rows) = (g.n1(), g.rows());
        let (h1, h2) = (g.h1(), g.h2());
        let mut best = GradientSup { value: 0.0, x1: g.x1(0), x2: g.x2(0), h: h1.max(h2) };
        for j in 0..rows {
            let (ja, jb) = match g.kind() {
                DomainKind::DoubledTorus => (j, (j + 1) % rows),
                DomainKind::Strip if j + 1 < rows => (j, j + 1),
                DomainKind::Strip => (j - 1, j),
            };
            for i in 0..n1 {
                let v = self.values[j * n1 + i];
                let d1 = (self.values[j * n1 + (i + 1) % n1] - v) / h1;
                let d2 = (self.values[jb * n1 + i] - self.values[ja * n1 + i]) / h2;
                let m = d1.hypot(d2);
                if m > best.value {
                    best.value = m;
                    best.x1 = g.x1(i);
                    best.x2 = g.x2(j);
                }
            }
        }
        best
    }

    /// Copies the rows with `x2` in `[0, 1]` onto the strip grid.
    pub fn restrict_to_strip(&self) -> Result<ScalarField> {
        self.grid.ensure_kind(DomainKind::DoubledTorus)?;
        let g = self.grid;
        let strip = g.as_strip();
        let values = restrict_values(&g, &self.values);
        Ok(ScalarField::from_parts(strip, values, self.parity))
    }

    /// Odd extension across `x2 = 0` to the doubled torus.
    ///
    /// Rows on `x2 = 0` and `x2 = +-1` become zero, the average of the two
    /// one-sided limits, so the output is exactly antisymmetric.
    pub fn extend_odd_x2(&self) -> Result<ScalarField> {
        self.grid.ensure_kind(DomainKind::Strip)?;
        let doubled = self.grid.as_doubled();
        let mut values = vec![0.0; doubled.len()];
        extend_odd_values(&doubled, &self.values, &mut values);
        Ok(ScalarField::from_parts(
            doubled,
            values,
            ParityClass::new(self.parity.x1, Parity::Odd),
        ))
    }
}

pub(crate) fn restrict_values(doubled: &TorusGrid, values: &[f64]) -> Vec<f64> {
    let (n1, n2) = (doubled.n1(), doubled.n2());
    let rows = n2 / 2 + 1;
    let mut out = Vec::with_capacity(n1 * rows);
    for j in 0..rows {
        let src = (j + n2 / 2) % n2;
        out.extend_from_slice(&values[src * n1..(src + 1) * n1]);
    }
    out
}

pub(crate) fn extend_odd_values(doubled: &TorusGrid, strip: &[f64], out: &mut [f64]) {
    let (n1, n2) = (doubled.n1(), doubled.n2());
    let half = n2 / 2;
    for j in 1..half {
        let row = &strip[j * n1..(j + 1) * n1];
        let up = (half + j) * n1;
        out[up..up + n1].copy_from_slice(row);
        let down = (half - j) * n1;
        for (o, v) in out[down..down + n1].iter_mut().zip(row) {
            *o = -v;
        }
    }
    out[..n1].fill(0.0);
    out[half * n1..(half + 1) * n1].fill(0.0);
}

pub(crate) fn symmetrize_values(g: &TorusGrid, parity: ParityClass, values: &mut [f64]) {
    let n1 = g.n1();
    if let Some(s) = parity.x1.sign() {
        for j in 0..g.rows() {
            let row = &mut values[j * n1..(j + 1) * n1];
            for i in 0..=n1 / 2 {
                let m = g.mirror1(i);
                let avg = 0.5 * (row[i] + s * row[m]);
                row[i] = avg;
                row[m] = s * avg;
            }
        }
    }
    if let Some(s) = parity.x2.sign() {
        match g.kind() {
            DomainKind::DoubledTorus => {
                for j in 0..=g.rows() / 2 {
                    let m = g.mirror2(j);
                    for i in 0..n1 {
                        let avg = 0.5 * (values[j * n1 + i] + s * values[m * n1 + i]);
                        values[j * n1 + i] = avg;
                        values[m * n1 + i] = s * avg;
                    }
                }
            }
            DomainKind::Strip => {
                if s < 0.0 {
                    let last = g.rows() - 1;
                    values[..n1].fill(0.0);
                    values[last * n1..].fill(0.0);
                }
            }
        }
    }
}

/// Pair of scalar fields on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub c1: ScalarField,
    pub c2: ScalarField,
}

impl VectorField {
    pub fn new(c1: ScalarField, c2: ScalarField) -> Result<Self> {
        c1.grid().ensure_same(c2.grid())?;
        Ok(Self { c1, c2 })
    }

    pub fn grid(&self) -> &TorusGrid {
        self.c1.grid()
    }

    pub fn zeros(grid: TorusGrid, p1: ParityClass, p2: ParityClass) -> Self {
        Self { c1: ScalarField::zeros(grid, p1), c2: ScalarField::zeros(grid, p2) }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { c1: self.c1.scaled(c), c2: self.c2.scaled(c) }
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        self.grid().ensure_same(other.grid())?;
        let sum = |a: &ScalarField, b: &ScalarField| {
            let v = a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect();
            ScalarField::from_parts(*a.grid(), v, a.parity())
        };
        Ok(Self { c1: sum(&self.c1, &other.c1), c2: sum(&self.c2, &other.c2) })
    }

    /// Largest pointwise magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.c1
            .values()
            .iter()
            .zip(self.c2.values())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn parity_violation(&self) -> f64 {
        self.c1.parity_violation().max(self.c2.parity_violation())
    }

    pub fn restrict_to_strip(&self) -> Result<VectorField> {
        Ok(Self { c1: self.c1.restrict_to_strip()?, c2: self.c2.restrict_to_strip()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn strip(n: usize) -> TorusGrid {
        TorusGrid::strip(n, n).unwrap()
    }

    #[test]
    fn constant_extends_to_signed_field_with_zero_mean() {
        let g = strip(16);
        let f = ScalarField::from_fn(g, ParityClass::NONE, |_, _| 2.5).unwrap();
        let e = f.extend_odd_x2().unwrap();
        assert_eq!(e.mean(), 0.0);
        let d = *e.grid();
        assert_eq!(e.get(3, d.n2() / 2 + 2), 2.5);
        assert_eq!(e.get(3, d.n2() / 2 - 2), -2.5);
        assert_eq!(e.get(3, d.n2() / 2), 0.0);
        assert_eq!(e.parity_violation_x2(), 0.0);
    }

    #[test]
    fn lp_norms_of_constant() {
        let g = strip(32);
        let f = ScalarField::from_fn(g, ParityClass::NONE, |_, _| 3.0).unwrap();
        assert!((f.lp_norm(1.0) - 6.0).abs() < 1e-12);
        assert!((f.lp_norm(2.0) - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(f.linf(), 3.0);
        assert!((f.mean() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn grad_sup_of_linear_ramp() {
        let g = strip(32);
        let f = ScalarField::from_fn(g, ParityClass::NONE, |_, x2| 3.0 * x2).unwrap();
        let gs = f.grad_sup();
        assert!((gs.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_values() {
        let g = strip(8);
        let mut v = vec![0.0; g.len()];
        v[3] = f64::NAN;
        assert!(matches!(
            ScalarField::new(g, v, ParityClass::NONE),
            Err(Error::NonFinite(_))
        ));
    }

    proptest! {
        #[test]
        fn extend_then_restrict_is_identity(seed in proptest::collection::vec(-5.0f64..5.0, 16 * 9)) {
            let g = strip(16);
            let mut f = ScalarField::new(g, seed, ParityClass::new(Parity::None, Parity::Odd)).unwrap();
            f.symmetrize();
            let back = f.extend_odd_x2().unwrap().restrict_to_strip().unwrap();
            prop_assert_eq!(back.values(), f.values());
        }

        #[test]
        fn extension_is_exactly_antisymmetric(seed in proptest::collection::vec(-5.0f64..5.0, 16 * 9)) {
            let f = ScalarField::new(strip(16), seed, ParityClass::NONE).unwrap();
            let e = f.extend_odd_x2().unwrap();
            prop_assert_eq!(e.parity_violation_x2(), 0.0);
        }

        #[test]
        fn symmetrize_is_exact_and_idempotent(seed in proptest::collection::vec(-5.0f64..5.0, 16 * 16)) {
            let g = TorusGrid::doubled(16, 16).unwrap();
            let f = ScalarField::new(g, seed, ParityClass::ODD_ODD).unwrap().symmetrized();
            prop_assert_eq!(f.parity_violation(), 0.0);
            let again = f.clone().symmetrized();
            prop_assert_eq!(again.values(), f.values());
        }
    }
}
