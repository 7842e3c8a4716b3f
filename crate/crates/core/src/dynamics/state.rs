//! Vorticity transport by semi-Lagrangian backtracking.

use serde::{Deserialize, Serialize};

use crate::dynamics::interp::{interp_strip, VelocityGrid, VelocitySource};
use crate::elliptic::{biot_savart, HarmonicExtension, SpectralWorkspace};
use crate::error::{Error, Result};
use crate::field::{extend_odd_values, symmetrize_values, ScalarField, VectorField};
use crate::grid::{Parity, ParityClass, TorusGrid};
use crate::initdata::{initial_vorticity, kinetic_energy};
use crate::params::SimParams;

const OMEGA_PARITY: ParityClass = ParityClass { x1: Parity::Odd, x2: Parity::None };

/// Injected error field: odd sine modes on the top wall, rescaled so that
/// `(1/2) int |e|^2 = c_factor^2 K(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionSpec {
    pub modes: Vec<(usize, f64)>,
    pub c_factor: f64,
}

impl InjectionSpec {
    pub fn build(&self, k0: f64) -> Result<Option<HarmonicExtension>> {
        if self.c_factor == 0.0 || self.modes.is_empty() {
            return Ok(None);
        }
        if !(self.c_factor > 0.0 && self.c_factor.is_finite()) {
            return Err(Error::InvalidSpec(format!("c_factor = {}", self.c_factor)));
        }
        let e = HarmonicExtension::from_sine_modes(&self.modes)?;
        Ok(Some(e.normalized(2.0 * k0 * self.c_factor * self.c_factor)?))
    }
}

/// Diagnostics of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub t: f64,
    pub cfl: f64,
    pub parity_violation: f64,
}

/// Departure points of one backward RK3 step and clipped cubic interpolation.
///
/// `now` is the velocity at the arrival time and `then` at the departure
/// time. Every node of the strip is updated.
pub fn advect<A: VelocitySource, B: VelocitySource>(
    values: &[f64],
    grid: &TorusGrid,
    then: &A,
    now: &B,
    dt: f64,
    clip: bool,
    out: &mut [f64],
) {
    let n1 = grid.n1();
    let half = 0.5 * dt;
    let frozen = std::ptr::eq(then as *const A as *const u8, now as *const B as *const u8);
    for j in 0..grid.rows() {
        let x2 = grid.x2(j);
        for i in 0..n1 {
            let x1 = grid.x1(i);
            let k1 = now.velocity(x1, x2);
            let pa = then.velocity(x1 - half * k1[0], x2 - half * k1[1]);
            let pb = if frozen { pa } else { now.velocity(x1 - half * k1[0], x2 - half * k1[1]) };
            let k2 = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
            let k3 = then.velocity(x1 + dt * (k1[0] - 2.0 * k2[0]), x2 + dt * (k1[1] - 2.0 * k2[1]));
            let d1 = x1 - dt / 6.0 * (k1[0] + 4.0 * k2[0] + k3[0]);
            let d2 = x2 - dt / 6.0 * (k1[1] + 4.0 * k2[1] + k3[1]);
            out[j * n1 + i] = interp_strip(values, grid, d1, d2, clip);
        }
    }
}

/// Evolving vorticity with its cached velocity.
pub struct SimState {
    params: SimParams,
    grid: TorusGrid,
    torus: TorusGrid,
    ws: SpectralWorkspace,
    omega: Vec<f64>,
    vel: VelocityGrid,
    error: Option<HarmonicExtension>,
    error_rows: Option<VelocityGrid>,
    t: f64,
    step: u64,
    parity_violation: f64,
    cfl_warned: bool,
    torus_buf: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    scratch: Vec<f64>,
}

impl SimState {
    /// Initial state `omega = epsilon f` with optional injection.
    pub fn new(params: &SimParams, injection: Option<&InjectionSpec>) -> Result<Self> {
        params.validate()?;
        let omega = initial_vorticity(params)?;
        let error = match injection {
            Some(spec) => spec.build(initial_energy(params, &omega)?)?,
            None => None,
        };
        Self::from_parts(params, omega, 0, error)
    }

    /// State at `step` with the given vorticity, for resuming.
    pub fn from_parts(
        params: &SimParams,
        omega: ScalarField,
        step: u64,
        error: Option<HarmonicExtension>,
    ) -> Result<Self> {
        let grid = params.strip_grid()?;
        grid.ensure_same(omega.grid())?;
        let torus = grid.as_doubled();
        let ws = SpectralWorkspace::new(&torus);
        let len = torus.len();
        let mut s = Self {
            params: params.clone(),
            grid,
            torus,
            ws,
            omega: omega.into_values(),
            vel: VelocityGrid::from_torus_values(&torus, &vec![0.0; len], &vec![0.0; len]),
            error_rows: None,
            error,
            t: step as f64 * params.dt,
            step,
            parity_violation: 0.0,
            cfl_warned: false,
            torus_buf: vec![0.0; len],
            u1: vec![0.0; len],
            u2: vec![0.0; len],
            scratch: vec![0.0; grid.len()],
        };
        if let Some(e) = &s.error {
            let mut rows = s.vel.zeros_like();
            rows.add_error(e);
            s.error_rows = Some(rows);
        }
        let w = std::mem::take(&mut s.omega);
        s.vel = s.solve_velocity(&w);
        s.omega = w;
        Ok(s)
    }

    /// `biot_savart(omega)` plus the injected field on the padded grid.
    fn solve_velocity(&mut self, omega: &[f64]) -> VelocityGrid {
        extend_odd_values(&self.torus, omega, &mut self.torus_buf);
        self.ws.velocity(&self.torus_buf, &mut self.u1, &mut self.u2);
        symmetrize_values(&self.torus, ParityClass::new(Parity::Odd, Parity::Even), &mut self.u1);
        symmetrize_values(&self.torus, ParityClass::new(Parity::Even, Parity::Odd), &mut self.u2);
        let mut v = VelocityGrid::from_torus_values(&self.torus, &self.u1, &self.u2);
        if let Some(rows) = &self.error_rows {
            v.add_rows(rows);
        }
        v
    }

    /// Advances by the configured step.
    pub fn step(&mut self) -> Result<StepInfo> {
        self.step_with(self.params.dt)
    }

    /// One predictor-corrector step of size `dt`.
    pub fn step_with(&mut self, dt: f64) -> Result<StepInfo> {
        let cfl = dt * self.vel.max_speed() / self.grid.h1();
        if cfl > 1.0 {
            if self.params.cfl_strict {
                return Err(Error::CflViolation(cfl));
            }
            if !self.cfl_warned {
                log::warn!("CFL number {cfl:.3} exceeds 1 at t = {:.4}", self.t);
                self.cfl_warned = true;
            }
        }
        let clip = self.params.clip;
        let mut star = std::mem::take(&mut self.scratch);
        // predictor: frozen velocity
        advect(&self.omega, &self.grid, &self.vel, &self.vel, dt, clip, &mut star);
        symmetrize_values(&self.grid, OMEGA_PARITY, &mut star);
        let v_star = self.solve_velocity(&star);
        // corrector: velocity interpolated between the two time levels
        advect(&self.omega, &self.grid, &self.vel, &v_star, dt, clip, &mut star);
        if star.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("vorticity at t = {}", self.t + dt)));
        }
        let raw = ScalarField::from_parts(self.grid, star, OMEGA_PARITY);
        self.parity_violation = raw.parity_violation_x1();
        let mut next = raw.into_values();
        symmetrize_values(&self.grid, OMEGA_PARITY, &mut next);
        self.scratch = std::mem::replace(&mut self.omega, next);
        let w = std::mem::take(&mut self.omega);
        self.vel = self.solve_velocity(&w);
        self.omega = w;
        self.step += 1;
        // stepping with the configured dt keeps t an exact function of the step count
        self.t = if dt == self.params.dt { self.step as f64 * dt } else { self.t + dt };
        Ok(StepInfo { t: self.t, cfl, parity_violation: self.parity_violation })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn omega(&self) -> ScalarField {
        ScalarField::from_parts(self.grid, self.omega.clone(), OMEGA_PARITY)
    }

    pub fn omega_values(&self) -> &[f64] {
        &self.omega
    }

    /// Transport velocity on the padded grid, including any injected field.
    pub fn velocity(&self) -> &VelocityGrid {
        &self.vel
    }

    /// Transport velocity at the strip nodes.
    pub fn velocity_field(&self) -> Result<VectorField> {
        let g = self.grid;
        let (mut a, mut b) = (Vec::with_capacity(g.len()), Vec::with_capacity(g.len()));
        for j in 0..g.rows() {
            for i in 0..g.n1() {
                let v = self.vel.node(i, j);
                a.push(v[0]);
                b.push(v[1]);
            }
        }
        VectorField::new(
            ScalarField::new(g, a, ParityClass::new(Parity::Odd, Parity::None))?,
            ScalarField::new(g, b, ParityClass::new(Parity::Even, Parity::Odd))?,
        )
    }

    /// `biot_savart(omega)` alone, without the injected field.
    pub fn surrogate_velocity(&mut self) -> Result<VectorField> {
        let w = self.omega();
        biot_savart(&mut self.ws, &w)
    }

    pub fn injected(&self) -> Option<&HarmonicExtension> {
        self.error.as_ref()
    }

    /// Raw parity violation of the most recent step.
    pub fn parity_violation(&self) -> f64 {
        self.parity_violation
    }
}

/// `K(0)` of the surrogate velocity of the initial data.
pub fn initial_energy(params: &SimParams, omega0: &ScalarField) -> Result<f64> {
    let mut ws = SpectralWorkspace::new(&params.torus_grid()?);
    Ok(kinetic_energy(&biot_savart(&mut ws, omega0)?))
}
