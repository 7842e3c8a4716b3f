//! Run configuration: TOML text with top-level scenario keys and optional
//! `[output]`, `[injection]`, `[verify]`, `[analyze]` and `[sweep]` tables.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use vssc::dynamics::InjectionSpec;
use vssc::SimParams;

use crate::suites::SUITES;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Steps between report rows.
    pub output_every: u64,
    /// Steps between checkpoints; 0 writes only the first and last.
    pub checkpoint_every: u64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), output_every: 16, checkpoint_every: 256 }
    }
}

/// Odd sine modes `(k, amplitude)` of the top-wall data and the energy factor `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectionConfig {
    pub modes: Vec<(usize, f64)>,
    pub c_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub suites: Vec<String>,
    pub key_lemma_points: usize,
    pub greens_points: usize,
    /// Resolution of the lattice-sum comparison.
    pub greens_n: usize,
    pub error_modes: usize,
    pub random_curves: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            key_lemma_points: 64,
            greens_points: 20,
            greens_n: 128,
            error_modes: 10,
            random_curves: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzeConfig {
    pub key_lemma_points: usize,
    pub sector_points: usize,
    /// Fit window `[t0, t1]` for the growth fits; the whole run when absent.
    pub window: Option<[f64; 2]>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self { key_lemma_points: 64, sector_points: 32, window: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub resolutions: Vec<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { epsilons: vec![0.25, 0.5], resolutions: vec![64, 128] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub epsilon: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub delta: f64,
    pub m: u32,
    pub n1: usize,
    pub n2: usize,
    /// Defaults to `5 / (epsilon n1)`.
    pub dt: Option<f64>,
    /// Defaults to `20 / epsilon`.
    pub t_end: Option<f64>,
    pub sym_tol: f64,
    pub div_tol: f64,
    pub omega_tol: f64,
    pub drift_tol: f64,
    pub lattice_n: usize,
    pub seed: u64,
    pub taper_top: f64,
    pub taper_bottom: f64,
    pub clip: bool,
    pub cfl_strict: bool,
    /// Refuse `epsilon >= epsilon0`.
    pub strict_gate: bool,
    pub output: OutputConfig,
    pub injection: Option<InjectionConfig>,
    pub verify: VerifyConfig,
    pub analyze: AnalyzeConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SimParams::default();
        Self {
            epsilon: p.epsilon,
            sigma: p.sigma,
            kappa: p.kappa,
            delta: p.delta,
            m: p.m,
            n1: p.n1,
            n2: p.n2,
            dt: None,
            t_end: None,
            sym_tol: p.sym_tol,
            div_tol: p.div_tol,
            omega_tol: p.omega_tol,
            drift_tol: p.drift_tol,
            lattice_n: p.lattice_n,
            seed: p.seed,
            taper_top: p.taper_top,
            taper_bottom: p.taper_bottom,
            clip: p.clip,
            cfl_strict: p.cfl_strict,
            strict_gate: false,
            output: OutputConfig::default(),
            injection: None,
            verify: VerifyConfig::default(),
            analyze: AnalyzeConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses, fills in derived defaults and validates.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse { line, column, message: e.message().to_string() }
    })?;
    raw.materialized()
}

impl RunConfig {
    /// Copy with `dt` and `t_end` filled in, validated.
    pub fn materialized(mut self) -> Result<Self, ConfigError> {
        if !(self.epsilon >= 0.0) || !(self.n1 > 0) {
            return Err(ConfigError::Validation(format!(
                "epsilon = {} and n1 = {} must be nonnegative and positive",
                self.epsilon, self.n1
            )));
        }
        self.dt.get_or_insert(SimParams::default_dt(self.epsilon, self.n1));
        self.t_end.get_or_insert(SimParams::default_t_end(self.epsilon));
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Validation(m));
        self.params().validate().map_err(|e| ConfigError::Validation(e.to_string()))?;
        if self.output.output_every == 0 {
            return bad("output.output_every must be positive".into());
        }
        for s in &self.verify.suites {
            if !SUITES.contains(&s.as_str()) {
                return bad(format!("unknown suite '{s}'; known: {}", SUITES.join(", ")));
            }
        }
        if self.verify.greens_n < 8 || self.verify.greens_n % 2 != 0 {
            return bad(format!("verify.greens_n = {} must be even and >= 8", self.verify.greens_n));
        }
        if let Some(inj) = &self.injection {
            if !(inj.c_factor >= 0.0 && inj.c_factor.is_finite()) {
                return bad(format!("injection.c_factor = {} must be finite and >= 0", inj.c_factor));
            }
            if inj.modes.iter().any(|(k, a)| *k == 0 || !a.is_finite()) {
                return bad("injection.modes need k >= 1 and finite amplitudes".into());
            }
        }
        if let Some([a, b]) = self.analyze.window {
            if !(a < b) {
                return bad(format!("analyze.window [{a}, {b}] must be increasing"));
            }
        }
        if self.sweep.epsilons.iter().any(|e| !(*e > 0.0)) {
            return bad("sweep.epsilons must be positive".into());
        }
        if self.sweep.resolutions.iter().any(|n| *n < 8 || n % 2 != 0) {
            return bad("sweep.resolutions must be even and >= 8".into());
        }
        Ok(())
    }

    pub fn params(&self) -> SimParams {
        SimParams {
            epsilon: self.epsilon,
            sigma: self.sigma,
            kappa: self.kappa,
            delta: self.delta,
            m: self.m,
            n1: self.n1,
            n2: self.n2,
            dt: self.dt.unwrap_or_else(|| SimParams::default_dt(self.epsilon, self.n1)),
            t_end: self.t_end.unwrap_or_else(|| SimParams::default_t_end(self.epsilon)),
            sym_tol: self.sym_tol,
            div_tol: self.div_tol,
            omega_tol: self.omega_tol,
            drift_tol: self.drift_tol,
            lattice_n: self.lattice_n,
            seed: self.seed,
            taper_top: self.taper_top,
            taper_bottom: self.taper_bottom,
            clip: self.clip,
            cfl_strict: self.cfl_strict,
        }
    }

    pub fn injection_spec(&self) -> Option<InjectionSpec> {
        self.injection.as_ref().map(|i| InjectionSpec { modes: i.modes.clone(), c_factor: i.c_factor })
    }

    /// Copy for a sweep point: new amplitude and resolution, derived step and horizon.
    pub fn with_point(&self, epsilon: f64, n: usize) -> Result<Self, ConfigError> {
        Self { epsilon, n1: n, n2: n, dt: None, t_end: None, ..self.clone() }.materialized()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the serialized configuration without the output directory, hex encoded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = OutputConfig::default().dir;
        Sha256::digest(c.to_toml().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Name and version of this build.
pub fn build_id() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}
