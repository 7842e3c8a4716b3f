//! Numerical experiments on small-scale creation for 2D Euler flow on the
//! periodic strip `[-1, 1) x [0, 1]`.
//!
//! Vorticity `omega` is odd in `x1`. The velocity is `u = grad_perp psi`
//! with `grad_perp = (d2, -d1)` and `Laplace psi = omega`, `psi = 0` on the
//! walls, so that `omega = d2 u1 - d1 u2` and a positive patch on the right
//! of the axis drives flow toward the origin along the bottom wall.

pub mod error;
pub mod field;
pub mod grid;
pub mod curve;
pub mod params;
pub mod quad;
pub mod report;
pub mod checkpoint;

pub mod elliptic;
pub mod initdata;
pub mod dynamics;
pub mod analysis;

pub use error::{Error, Result};
pub use field::{GradientSup, ScalarField, VectorField};
pub use grid::{DomainKind, Parity, ParityClass, TorusGrid};
pub use curve::PolyCurve;
pub use params::SimParams;
pub use report::{FitModel, FitParam, FitResult, GrowthReport, Sample};
