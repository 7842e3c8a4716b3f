//! Full runs: stepping, tracers, brackets, output samples and checkpoints.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::checkpoint::{read_checkpoint, write_checkpoint};
use crate::dynamics::bracket::BracketState;
use crate::dynamics::state::{initial_energy, InjectionSpec, SimState};
use crate::dynamics::tracer::Tracer;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::initdata::{epsilon_gate, initial_vorticity, kinetic_energy, EnergyBudget};
use crate::params::SimParams;
use crate::report::{GrowthReport, Sample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Steps between output samples.
    pub output_every: u64,
    /// Steps between checkpoints; needs `out_dir`.
    pub checkpoint_every: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub injection: Option<InjectionSpec>,
    /// Refuse to run when `K(0) > sigma / 20`.
    pub strict_gate: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { output_every: 16, checkpoint_every: None, out_dir: None, injection: None, strict_gate: false }
    }
}

/// Everything a run produces besides the files it writes.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: GrowthReport,
    pub brackets: BracketState,
    pub tracer: Tracer,
    pub k0: f64,
    pub budget: EnergyBudget,
    /// Largest raw parity violation over all steps.
    pub max_parity_violation: f64,
    pub checkpoints: Vec<PathBuf>,
    pub final_omega: ScalarField,
}

/// Tracer, brackets and samples stored next to a checkpoint so that a
/// resumed run continues exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSidecar {
    pub step: u64,
    pub tracer: Tracer,
    pub brackets: BracketState,
    pub samples: Vec<Sample>,
    pub max_violation: f64,
    pub window_violation: f64,
}

pub fn read_sidecar(checkpoint: &Path) -> Result<RunSidecar> {
    let path = sidecar_path(checkpoint);
    let text =
        std::fs::read_to_string(&path).map_err(|e| Error::Checkpoint { path: path.clone(), reason: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| Error::Checkpoint { path, reason: e.to_string() })
}

pub fn sidecar_path(checkpoint: &Path) -> PathBuf {
    checkpoint.with_extension("aux.json")
}

pub fn checkpoint_path(dir: &Path, step: u64) -> PathBuf {
    dir.join(format!("checkpoint_{step:08}.vssc"))
}

struct Runner<'a> {
    params: SimParams,
    opts: &'a RunOptions,
    state: SimState,
    tracer: Tracer,
    brackets: BracketState,
    samples: Vec<Sample>,
    max_violation: f64,
    window_violation: f64,
    checkpoints: Vec<PathBuf>,
    k0: f64,
    budget: EnergyBudget,
}

/// Observer called at every output time.
pub type Observer<'o> = dyn FnMut(&mut SimState, &BracketState, &Sample) -> Result<()> + 'o;

pub fn run(params: &SimParams, opts: &RunOptions) -> Result<RunOutput> {
    run_with(params, opts, &mut |_, _, _| Ok(()))
}

pub fn run_with(params: &SimParams, opts: &RunOptions, observer: &mut Observer<'_>) -> Result<RunOutput> {
    let (k0, budget) = gate(params, opts)?;
    let state = SimState::new(params, opts.injection.as_ref())?;
    let tracer = Tracer::new("boundary", (params.delta, 0.0), 0.0)?;
    let brackets = BracketState::new(params.plateau_start(), params.kappa, 0.0)?;
    let mut r = Runner {
        params: params.clone(),
        opts,
        state,
        tracer,
        brackets,
        samples: Vec::new(),
        max_violation: 0.0,
        window_violation: 0.0,
        checkpoints: Vec::new(),
        k0,
        budget,
    };
    r.sample(observer)?;
    r.maybe_checkpoint()?;
    r.drive(observer)
}

/// Continues a run from a checkpoint written by [`run`].
pub fn resume(params: &SimParams, opts: &RunOptions, checkpoint: &Path) -> Result<RunOutput> {
    resume_with(params, opts, checkpoint, &mut |_, _, _| Ok(()))
}

pub fn resume_with(
    params: &SimParams,
    opts: &RunOptions,
    checkpoint: &Path,
    observer: &mut Observer<'_>,
) -> Result<RunOutput> {
    let (k0, budget) = gate(params, opts)?;
    let ck = read_checkpoint(checkpoint)?;
    let aux = read_sidecar(checkpoint)?;
    if ck.epsilon != params.epsilon {
        return Err(Error::Checkpoint {
            path: checkpoint.to_path_buf(),
            reason: format!("epsilon {} does not match {}", ck.epsilon, params.epsilon),
        });
    }
    if (aux.step as f64 * params.dt).to_bits() != ck.t.to_bits() {
        return Err(Error::Checkpoint {
            path: checkpoint.to_path_buf(),
            reason: format!("time {} is not step {} of dt = {}", ck.t, aux.step, params.dt),
        });
    }
    let error = match &opts.injection {
        Some(spec) => spec.build(initial_energy(params, &initial_vorticity(params)?)?)?,
        None => None,
    };
    let state = SimState::from_parts(params, ck.field, aux.step, error)?;
    let r = Runner {
        params: params.clone(),
        opts,
        state,
        tracer: aux.tracer,
        brackets: aux.brackets,
        samples: aux.samples,
        max_violation: aux.max_violation,
        window_violation: aux.window_violation,
        checkpoints: Vec::new(),
        k0,
        budget,
    };
    r.drive(observer)
}

fn gate(params: &SimParams, opts: &RunOptions) -> Result<(f64, EnergyBudget)> {
    params.validate()?;
    if opts.output_every == 0 || opts.checkpoint_every == Some(0) {
        return Err(Error::InvalidSpec("output and checkpoint cadence must be positive".into()));
    }
    if opts.checkpoint_every.is_some() && opts.out_dir.is_none() {
        return Err(Error::InvalidSpec("checkpoints need an output directory".into()));
    }
    let omega0 = initial_vorticity(params)?;
    let k0 = initial_energy(params, &omega0)?;
    let eps2 = params.epsilon * params.epsilon;
    let c1 = if eps2 > 0.0 { k0 / eps2 } else { f64::MIN_POSITIVE };
    let budget = epsilon_gate(c1, params.sigma)?;
    if opts.strict_gate {
        budget.check(params.epsilon)?;
    }
    Ok((k0, budget))
}

impl Runner<'_> {
    fn drive(mut self, observer: &mut Observer<'_>) -> Result<RunOutput> {
        match self.advance(observer) {
            Ok(()) => self.finish(),
            Err(e) => {
                if let Some(dir) = &self.opts.out_dir {
                    let report = self.report();
                    if let Err(w) = report.save(&dir.join("report_partial.csv")) {
                        log::error!("could not flush partial report: {w}");
                    }
                }
                Err(e)
            }
        }
    }

    fn advance(&mut self, observer: &mut Observer<'_>) -> Result<()> {
        let total = self.params.steps();
        let dt = self.params.dt;
        while self.state.step_count() < total {
            let before = self.state.velocity().clone();
            let t = self.state.t();
            let info = self.state.step()?;
            self.max_violation = self.max_violation.max(info.parity_violation);
            self.window_violation = self.window_violation.max(info.parity_violation);
            let after = self.state.velocity();
            self.tracer.advance(&before, after, t, dt)?;
            self.brackets.advance(&before, after, dt)?;
            let step = self.state.step_count();
            if step % self.opts.output_every == 0 || step == total {
                self.sample(observer)?;
            }
            self.maybe_checkpoint()?;
        }
        Ok(())
    }

    /// Checkpoints at step 0, every `checkpoint_every` steps and at the end.
    fn maybe_checkpoint(&mut self) -> Result<()> {
        let step = self.state.step_count();
        if let (Some(every), Some(dir)) = (self.opts.checkpoint_every, &self.opts.out_dir) {
            if step % every == 0 || step == self.params.steps() {
                let path = checkpoint_path(dir, step);
                self.write_checkpoint(&path)?;
                self.checkpoints.push(path);
            }
        }
        Ok(())
    }

    fn sample(&mut self, observer: &mut Observer<'_>) -> Result<()> {
        let omega = self.state.omega();
        let g = omega.grad_sup();
        let u = self.state.surrogate_velocity()?;
        let s = Sample {
            t: self.state.t(),
            grad_sup: g.value,
            grad_x1: g.x1,
            grad_x2: g.x2,
            eta1: self.tracer.position.0,
            a: self.brackets.a,
            b: self.brackets.b,
            kinetic: kinetic_energy(&u),
            l1: omega.lp_norm(1.0),
            l2: omega.lp_norm(2.0),
            l4: omega.lp_norm(4.0),
            linf: omega.linf(),
            parity_violation: self.window_violation,
        };
        self.window_violation = 0.0;
        self.samples.push(s);
        observer(&mut self.state, &self.brackets, &s)
    }

    fn write_checkpoint(&self, path: &Path) -> Result<()> {
        write_checkpoint(path, &self.state.omega(), self.state.t(), self.params.epsilon)?;
        let aux = RunSidecar {
            step: self.state.step_count(),
            tracer: self.tracer.clone(),
            brackets: self.brackets.clone(),
            samples: self.samples.clone(),
            max_violation: self.max_violation,
            window_violation: self.window_violation,
        };
        let text = serde_json::to_string(&aux).map_err(|e| Error::Report(e.to_string()))?;
        let target = sidecar_path(path);
        let tmp = target.with_extension("json.tmp");
        std::fs::write(&tmp, text)?;
        std::fs::rename(&tmp, &target)?;
        Ok(())
    }

    fn report(&self) -> GrowthReport {
        let p = &self.params;
        let mut r = GrowthReport { samples: self.samples.clone(), ..Default::default() };
        for (k, v) in [
            ("epsilon", p.epsilon.to_string()),
            ("sigma", p.sigma.to_string()),
            ("kappa", p.kappa.to_string()),
            ("delta", p.delta.to_string()),
            ("m", p.m.to_string()),
            ("n1", p.n1.to_string()),
            ("n2", p.n2.to_string()),
            ("dt", p.dt.to_string()),
            ("t_end", p.t_end.to_string()),
            ("clip", p.clip.to_string()),
            ("k0", self.k0.to_string()),
            ("epsilon0", self.budget.epsilon0.to_string()),
            ("grad_stencil", "forward difference, width h".to_string()),
        ] {
            r.set_meta(k, v);
        }
        if let Some(inj) = &self.opts.injection {
            r.set_meta("injection", format!("modes {:?}, c_factor {}", inj.modes, inj.c_factor));
        }
        r
    }

    fn finish(self) -> Result<RunOutput> {
        let report = self.report();
        Ok(RunOutput {
            report,
            brackets: self.brackets,
            tracer: self.tracer,
            k0: self.k0,
            budget: self.budget,
            max_parity_violation: self.max_violation,
            checkpoints: self.checkpoints,
            final_omega: self.state.omega(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimParams {
        let p = SimParams { kappa: 0.2, delta: 0.3, m: 2, ..SimParams::default() }.at_resolution(64);
        SimParams { t_end: 12.0 * p.dt, ..p }
    }

    #[test]
    fn zero_horizon_gives_one_sample() {
        let p = SimParams { t_end: 0.0, ..small() };
        let out = run(&p, &RunOptions::default()).unwrap();
        assert_eq!(out.report.samples.len(), 1);
        let s = out.report.samples[0];
        let f = crate::initdata::build_profile(&crate::initdata::ProfileSpec::from_params(&p), &p.strip_grid().unwrap())
            .unwrap();
        assert_eq!(s.grad_sup, p.epsilon * f.grad_sup().value);
        assert_eq!(s.eta1, p.delta);
    }

    #[test]
    fn runs_are_deterministic() {
        let opts = RunOptions { output_every: 4, ..Default::default() };
        let a = run(&small(), &opts).unwrap();
        let b = run(&small(), &opts).unwrap();
        assert_eq!(a.report, b.report);
        assert_eq!(a.report.samples.len(), 4);
        a.report.validate().unwrap();
    }

    #[test]
    fn resume_matches_uninterrupted_run() {
        let dir = tempfile::tempdir().unwrap();
        let opts = RunOptions {
            output_every: 3,
            checkpoint_every: Some(5),
            out_dir: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let full = run(&small(), &opts).unwrap();
        // steps 0, 5, 10 and the final step 12
        assert_eq!(full.checkpoints.len(), 4);
        let bare = RunOptions { checkpoint_every: None, ..opts.clone() };
        for ck in &full.checkpoints {
            let resumed = resume(&small(), &bare, ck).unwrap();
            assert_eq!(resumed.report.body().unwrap(), full.report.body().unwrap());
            assert_eq!(resumed.final_omega, full.final_omega);
            assert_eq!(resumed.brackets, full.brackets);
        }
        assert_eq!(read_sidecar(&full.checkpoints[3]).unwrap().step, 12);
    }

    #[test]
    fn strict_gate_rejects_large_amplitude() {
        let p = SimParams { epsilon: 3.0, t_end: 0.0, ..small() };
        let opts = RunOptions { strict_gate: true, ..Default::default() };
        assert!(matches!(run(&p, &opts), Err(Error::EnergyGate { .. })));
    }
}
