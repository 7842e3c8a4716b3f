use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// Physical, numerical and tolerance parameters of one experiment.
///
/// `dt` and `t_end` are stored already materialized; use
/// [`SimParams::default_dt`] and [`SimParams::default_t_end`] to derive them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub epsilon: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub delta: f64,
    pub m: u32,
    pub n1: usize,
    pub n2: usize,
    pub dt: f64,
    pub t_end: f64,
    pub sym_tol: f64,
    pub div_tol: f64,
    pub omega_tol: f64,
    pub drift_tol: f64,
    pub lattice_n: usize,
    pub seed: u64,
    /// Width of the smooth cutoff below `x2 = 1`; zero disables it.
    pub taper_top: f64,
    /// Width of the smooth cutoff above `x2 = 0`; zero disables it.
    pub taper_bottom: f64,
    /// Clip interpolated vorticity to the local cell range.
    pub clip: bool,
    /// Treat a CFL violation as an error rather than a warning.
    pub cfl_strict: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        let epsilon = 0.5;
        let n = 512;
        Self {
            epsilon,
            sigma: 1.0,
            kappa: 0.05,
            delta: 0.1,
            m: 2,
            n1: n,
            n2: n,
            dt: Self::default_dt(epsilon, n),
            t_end: Self::default_t_end(epsilon),
            sym_tol: 1e-10,
            div_tol: 1e-12,
            omega_tol: 1e-3,
            drift_tol: 1e-2,
            lattice_n: 64,
            seed: 0,
            taper_top: 1.0 / 16.0,
            taper_bottom: 0.0,
            clip: true,
            cfl_strict: false,
        }
    }
}

impl SimParams {
    /// Step giving a CFL number near 0.84 for the default profile.
    pub fn default_dt(epsilon: f64, n1: usize) -> f64 {
        5.0 / (epsilon.max(1e-3) * n1 as f64)
    }

    pub fn default_t_end(epsilon: f64) -> f64 {
        20.0 / epsilon.max(1e-3)
    }

    /// Copy with a new resolution and the matching default step.
    pub fn at_resolution(&self, n: usize) -> Self {
        Self { n1: n, n2: n, dt: Self::default_dt(self.epsilon, n), ..self.clone() }
    }

    pub fn strip_grid(&self) -> Result<TorusGrid> {
        TorusGrid::strip(self.n1, self.n2)
    }

    pub fn torus_grid(&self) -> Result<TorusGrid> {
        TorusGrid::doubled(self.n1, self.n2)
    }

    /// Left edge of the plateau, `kappa^m`.
    pub fn plateau_start(&self) -> f64 {
        self.kappa.powi(self.m as i32)
    }

    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as u64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon = {} must be finite and >= 0", self.epsilon));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma = {} must be > 0", self.sigma));
        }
        if !(0.0 < self.kappa && self.kappa < self.delta && self.delta < 0.5) {
            return bad(format!(
                "need 0 < kappa < delta < 1/2, got kappa = {}, delta = {}",
                self.kappa, self.delta
            ));
        }
        if self.m < 1 {
            return bad("m must be at least 1".into());
        }
        if self.plateau_start() >= 1.0 - self.delta {
            return bad("plateau [kappa^m, 1 - delta] is empty".into());
        }
        TorusGrid::strip(self.n1, self.n2)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be > 0", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be >= 0", self.t_end));
        }
        for (name, v) in [
            ("sym_tol", self.sym_tol),
            ("div_tol", self.div_tol),
            ("omega_tol", self.omega_tol),
            ("drift_tol", self.drift_tol),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be finite and >= 0"));
            }
        }
        if self.lattice_n < 1 {
            return bad("lattice_n must be at least 1".into());
        }
        for (name, v) in [("taper_top", self.taper_top), ("taper_bottom", self.taper_bottom)] {
            if !(0.0..=0.25).contains(&v) {
                return bad(format!("{name} = {v} must lie in [0, 1/4]"));
            }
        }
        Ok(())
    }
}
