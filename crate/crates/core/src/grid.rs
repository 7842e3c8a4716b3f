//! Uniform grids on the doubled torus and on the strip.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which domain a grid discretizes.
///
/// `DoubledTorus` is the periodic square `[-1, 1)^2`. `Strip` is the
/// physical domain `[-1, 1) x [0, 1]`, periodic in `x1` with walls at
/// `x2 = 0` and `x2 = 1`; its rows include both walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    DoubledTorus,
    Strip,
}

/// Grid on the doubled torus or the strip.
///
/// `n1` and `n2` always count points per period of the doubled torus, so a
/// strip grid with the same `(n1, n2)` has `n2 / 2 + 1` rows and shares
/// spacing with its torus counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    n1: usize,
    n2: usize,
    kind: DomainKind,
}

impl TorusGrid {
    pub fn new(n1: usize, n2: usize, kind: DomainKind) -> Result<Self> {
        for (name, n) in [("n1", n1), ("n2", n2)] {
            if n < 8 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be even and at least 8"
                )));
            }
        }
        Ok(Self { n1, n2, kind })
    }

    pub fn doubled(n1: usize, n2: usize) -> Result<Self> {
        Self::new(n1, n2, DomainKind::DoubledTorus)
    }

    pub fn strip(n1: usize, n2: usize) -> Result<Self> {
        Self::new(n1, n2, DomainKind::Strip)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn h1(&self) -> f64 {
        2.0 / self.n1 as f64
    }

    pub fn h2(&self) -> f64 {
        2.0 / self.n2 as f64
    }

    /// Number of stored rows.
    pub fn rows(&self) -> usize {
        match self.kind {
            DomainKind::DoubledTorus => self.n2,
            DomainKind::Strip => self.n2 / 2 + 1,
        }
    }

    pub fn len(&self) -> usize {
        self.n1 * self.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.h1()
    }

    #[inline]
    pub fn x2(&self, j: usize) -> f64 {
        match self.kind {
            DomainKind::DoubledTorus => -1.0 + j as f64 * self.h2(),
            DomainKind::Strip => j as f64 * self.h2(),
        }
    }

    /// Column index of `x1 = 0`.
    pub fn axis(&self) -> usize {
        self.n1 / 2
    }

    /// Column holding `-x1(i)`.
    #[inline]
    pub fn mirror1(&self, i: usize) -> usize {
        (self.n1 - i) % self.n1
    }

    /// Row holding `-x2(j)` on the doubled torus.
    #[inline]
    pub fn mirror2(&self, j: usize) -> usize {
        (self.n2 - j) % self.n2
    }

    pub fn as_strip(&self) -> Self {
        Self { kind: DomainKind::Strip, ..*self }
    }

    pub fn as_doubled(&self) -> Self {
        Self { kind: DomainKind::DoubledTorus, ..*self }
    }

    /// Same domain kind and point counts.
    pub fn ensure_same(&self, other: &TorusGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }

    pub fn ensure_kind(&self, kind: DomainKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::GridMismatch(format!(
                "expected {kind:?} grid, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }
}

/// Reflection symmetry of a field in one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
    None,
}

impl Parity {
    /// Parity after one derivative in the same coordinate.
    pub fn flip(self) -> Self {
        match self {
            Parity::Odd => Parity::Even,
            Parity::Even => Parity::Odd,
            Parity::None => Parity::None,
        }
    }

    /// `+1` for even, `-1` for odd.
    pub fn sign(self) -> Option<f64> {
        match self {
            Parity::Odd => Some(-1.0),
            Parity::Even => Some(1.0),
            Parity::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityClass {
    pub x1: Parity,
    pub x2: Parity,
}

impl ParityClass {
    pub const NONE: ParityClass = ParityClass { x1: Parity::None, x2: Parity::None };
    pub const ODD_ODD: ParityClass = ParityClass { x1: Parity::Odd, x2: Parity::Odd };

    pub fn new(x1: Parity, x2: Parity) -> Self {
        Self { x1, x2 }
    }
}
