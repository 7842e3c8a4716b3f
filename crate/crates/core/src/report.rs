//! Time series recorded by a run, fitted growth laws and their CSV form.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One output time of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    /// Forward-difference `sup |grad omega|`.
    pub grad_sup: f64,
    /// Location of the gradient maximum.
    pub grad_x1: f64,
    pub grad_x2: f64,
    /// Abscissa of the bottom tracer started at `(delta, 0)`.
    pub eta1: f64,
    pub a: f64,
    pub b: f64,
    pub kinetic: f64,
    pub l1: f64,
    pub l2: f64,
    pub l4: f64,
    pub linf: f64,
    /// Raw `x1` parity violation of the last step before symmetrization.
    pub parity_violation: f64,
}

impl Sample {
    pub const COLUMNS: [&'static str; 13] = [
        "t", "grad_sup", "grad_x1", "grad_x2", "eta1", "a", "b", "kinetic", "l1", "l2", "l4", "linf",
        "parity_violation",
    ];

    pub fn log_ratio(&self) -> f64 {
        (self.b / self.a).ln()
    }

    fn to_row(self) -> [f64; 13] {
        [
            self.t,
            self.grad_sup,
            self.grad_x1,
            self.grad_x2,
            self.eta1,
            self.a,
            self.b,
            self.kinetic,
            self.l1,
            self.l2,
            self.l4,
            self.linf,
            self.parity_violation,
        ]
    }

    fn from_row(r: &[f64]) -> Self {
        Self {
            t: r[0],
            grad_sup: r[1],
            grad_x1: r[2],
            grad_x2: r[3],
            eta1: r[4],
            a: r[5],
            b: r[6],
            kinetic: r[7],
            l1: r[8],
            l2: r[9],
            l4: r[10],
            linf: r[11],
            parity_violation: r[12],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    Exponential,
    DoubleExponential,
    Linear,
}

/// Fitted parameter with a 95% confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParam {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub params: Vec<FitParam>,
    pub residual_norm: f64,
    pub window: (f64, f64),
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }
}

/// Samples of a run plus free-form metadata and fits.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub meta: Vec<(String, String)>,
    pub samples: Vec<Sample>,
    pub fits: Vec<FitResult>,
}

impl GrowthReport {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
    }

    /// Checks strictly increasing times and nonnegative norms.
    pub fn validate(&self) -> Result<()> {
        for w in self.samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::Report(format!("times not increasing at t = {}", w[1].t)));
            }
        }
        for s in &self.samples {
            let norms = [s.grad_sup, s.kinetic, s.l1, s.l2, s.l4, s.linf, s.parity_violation];
            if norms.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::Report(format!("negative or NaN norm at t = {}", s.t)));
            }
        }
        Ok(())
    }

    /// CSV with `# key: value` comment lines ahead of the header row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}: {}", v.replace('\n', " "))?;
        }
        let mut cw = csv::Writer::from_writer(w);
        cw.write_record(Sample::COLUMNS).map_err(csv_err)?;
        for s in &self.samples {
            cw.serialize(s.to_row()).map_err(csv_err)?;
        }
        cw.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut meta = Vec::new();
        let mut body = String::new();
        for line in BufReader::new(r).lines() {
            let line = line?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once(": ") {
                    meta.push((k.to_string(), v.to_string()));
                }
            } else {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let mut rd = csv::Reader::from_reader(body.as_bytes());
        let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(String::from).collect();
        if header != Sample::COLUMNS {
            return Err(Error::Report(format!("unexpected columns {header:?}")));
        }
        let mut samples = Vec::new();
        for rec in rd.deserialize::<Vec<f64>>() {
            let row = rec.map_err(csv_err)?;
            if row.len() != Sample::COLUMNS.len() {
                return Err(Error::Report(format!("row with {} fields", row.len())));
            }
            samples.push(Sample::from_row(&row));
        }
        Ok(Self { meta, samples, fits: Vec::new() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(f)
    }

    /// CSV text without the comment lines.
    pub fn body(&self) -> Result<String> {
        let bare = GrowthReport { meta: Vec::new(), samples: self.samples.clone(), fits: Vec::new() };
        let mut buf = Vec::new();
        bare.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Report(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Report(e.to_string())
}
