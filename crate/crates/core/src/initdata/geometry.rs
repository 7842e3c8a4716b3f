use serde::{Deserialize, Serialize};

use crate::curve::PolyCurve;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::initdata::energy::kinetic_energy;

/// Height of the unperturbed free boundary.
pub const FLAT_HEIGHT: f64 = 2.0;
/// Half-width of the confinement band around the flat boundary.
pub const BAND_HALF_WIDTH: f64 = 0.5;

pub fn curve_length(c: &PolyCurve) -> Result<f64> {
    c.length()
}

/// Outcome of the band-confinement test for one candidate curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfinementVerdict {
    pub length: f64,
    pub exits_band: bool,
    pub within_budget: bool,
    /// `exits_band` implies `length >= sqrt(5)`.
    pub implication_holds: bool,
}

pub fn confinement_check(c: &PolyCurve, length_budget: f64) -> Result<ConfinementVerdict> {
    if !c.closed || c.winding.abs() != 1 {
        return Err(Error::NotGammaCandidate(format!(
            "closed = {}, winding = {}",
            c.closed, c.winding
        )));
    }
    let (lo, hi) = (c.min_height(), c.max_height());
    if !(lo <= FLAT_HEIGHT && FLAT_HEIGHT <= hi) {
        return Err(Error::NotGammaCandidate(format!("heights [{lo}, {hi}] miss x2 = 2")));
    }
    let length = c.length()?;
    let exits_band = lo <= FLAT_HEIGHT - BAND_HALF_WIDTH || hi >= FLAT_HEIGHT + BAND_HALF_WIDTH;
    let implication_holds = !exits_band || length >= 5f64.sqrt() - 1e-12;
    Ok(ConfinementVerdict {
        length,
        exits_band,
        within_budget: length <= length_budget,
        implication_holds,
    })
}

/// `K + sigma L`, plus `g P` when gravity is given.
pub fn energy_functional(u: &VectorField, c: &PolyCurve, sigma: f64, gravity: Option<f64>) -> Result<f64> {
    let mut e = kinetic_energy(u) + sigma * c.length()?;
    if let Some(g) = gravity {
        e += g * c.potential_energy()?;
    }
    Ok(e)
}
