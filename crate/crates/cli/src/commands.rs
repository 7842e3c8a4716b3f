//! Subcommands. Each writes its artifacts into one output directory.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use vssc::analysis::{
    ball_points, c3_constant, conservation_audit, diffineq_audit, growth_fit, sector_lower_bound_check,
    sector_signs, trapezoid_check, DiffIneqAudit, DriftRow, GrowthFit,
};
use vssc::checkpoint::read_checkpoint;
use vssc::dynamics::{read_sidecar, resume, run, BracketSample, RunOptions, RunOutput, VelocityGrid};
use vssc::elliptic::{biot_savart, SpectralWorkspace};
use vssc::initdata::{initial_vorticity, kinetic_energy};
use vssc::{FitResult, GrowthReport};

use crate::config::RunConfig;
use crate::output::{csv_table, Artifacts, CliError, CliResult};
use crate::suites::{keylemma_csv, keylemma_samples, run_suites, suites_csv, summary_text};
use crate::svg::{line_plot, Series};

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// False when an enabled suite failed.
    pub pass: bool,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

pub const CHECKPOINT_DIR: &str = "checkpoints";

fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn cmd_verify(cfg: &RunConfig, out: &Path, suites: Option<&[String]>) -> CliResult<Outcome> {
    let art = Artifacts::new(out, cfg)?;
    let names: Vec<String> = suites.map(|s| s.to_vec()).unwrap_or_else(|| cfg.verify.suites.clone());
    for n in &names {
        if !crate::suites::SUITES.contains(&n.as_str()) {
            return Err(CliError::Input(format!("unknown suite '{n}'")));
        }
    }
    let (reports, table) = run_suites(cfg, &names)?;
    let mut files = vec![art.echo_config(cfg)?, art.write_csv("verify.csv", &suites_csv(&reports))?];
    if let Some(t) = table {
        files.push(art.write_csv("keylemma_t0.csv", &keylemma_csv(&t))?);
    }
    let pass = reports.iter().all(|r| r.passed());
    let summary = format!("{}{}overall: {}\n", art.stamp("#"), summary_text(&reports), if pass { "PASS" } else { "FAIL" });
    files.push(art.write("verify_summary.txt", &summary)?);
    Ok(Outcome { pass, summary, files })
}

fn drift_csv(rows: &[DriftRow]) -> String {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.quantity.clone(), num(r.initial), num(r.max_drift), r.pass.to_string()])
        .collect();
    csv_table(&["quantity", "initial", "max_rel_drift", "pass"], &rows)
}

fn run_options(cfg: &RunConfig, dir: Option<PathBuf>) -> RunOptions {
    let every = if cfg.output.checkpoint_every == 0 { u64::MAX } else { cfg.output.checkpoint_every };
    RunOptions {
        output_every: cfg.output.output_every,
        checkpoint_every: dir.as_ref().map(|_| every),
        out_dir: dir,
        injection: cfg.injection_spec(),
        strict_gate: cfg.strict_gate,
    }
}

fn stamp_report(report: &mut GrowthReport, art: &Artifacts) {
    report.set_meta("config_hash", art.hash.clone());
    report.set_meta("build", art.build.clone());
}

pub fn cmd_run(cfg: &RunConfig, out: &Path, resume_from: Option<&Path>) -> CliResult<Outcome> {
    let art = Artifacts::new(out, cfg)?;
    let params = cfg.params();
    let ck_dir = out.join(CHECKPOINT_DIR);
    std::fs::create_dir_all(&ck_dir).map_err(|e| CliError::io(&ck_dir, e))?;
    let opts = run_options(cfg, Some(ck_dir));
    log::info!("running {} steps at n = {}", params.steps(), params.n1);
    let mut result: RunOutput = match resume_from {
        Some(path) => resume(&params, &opts, path)?,
        None => run(&params, &opts)?,
    };
    stamp_report(&mut result.report, &art);
    let mut files = vec![art.echo_config(cfg)?];
    let report_path = art.path("report.csv");
    result.report.save(&report_path)?;
    files.push(report_path);

    let rows: Vec<Vec<String>> =
        result.brackets.history.iter().map(|s| vec![num(s.t), num(s.a), num(s.b), num(s.log_ratio)]).collect();
    files.push(art.write_csv("brackets.csv", &csv_table(&["t", "a", "b", "log_ratio"], &rows))?);
    let rows: Vec<Vec<String>> =
        result.tracer.history.iter().map(|(t, x1, x2)| vec![num(*t), num(*x1), num(*x2)]).collect();
    files.push(art.write_csv("tracer.csv", &csv_table(&["t", "x1", "x2"], &rows))?);
    let drifts = conservation_audit(&result.report, params.drift_tol);
    files.push(art.write_csv("conservation.csv", &drift_csv(&drifts))?);

    let mut summary = art.stamp("#");
    summary.push_str(&format!(
        "steps: {}\nt_end: {}\nk0: {:.6e}\nepsilon0: {:.6e}\nmax parity violation: {:.3e}\nbracket ordering violations: {}\ncheckpoints: {}\n",
        params.steps(),
        params.t_end,
        result.k0,
        result.budget.epsilon0,
        result.max_parity_violation,
        result.brackets.ordering_violations,
        result.checkpoints.len()
    ));
    for d in &drifts {
        summary.push_str(&format!("drift {:<8} {:.3e} {}\n", d.quantity, d.max_drift, if d.pass { "ok" } else { "ABOVE TOLERANCE" }));
    }
    files.push(art.write("run_summary.txt", &summary)?);
    files.extend(result.checkpoints.iter().cloned());
    Ok(Outcome { pass: true, summary, files })
}

/// All checkpoints under `out/checkpoints`, in step order.
pub fn find_checkpoints(out: &Path) -> CliResult<Vec<PathBuf>> {
    let dir = out.join(CHECKPOINT_DIR);
    let entries = std::fs::read_dir(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut v: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "vssc"))
        .collect();
    v.sort();
    Ok(v)
}

fn fit_rows(f: &FitResult, rows: &mut Vec<Vec<String>>) {
    for p in &f.params {
        rows.push(vec![
            format!("{:?}", f.model),
            p.name.clone(),
            num(p.value),
            num(p.lo),
            num(p.hi),
            num(f.residual_norm),
            num(f.window.0),
            num(f.window.1),
        ]);
    }
}

const FIT_HEADER: [&str; 8] = ["model", "param", "value", "lo", "hi", "residual_norm", "window_lo", "window_hi"];

fn fits_table(growth: Option<&GrowthFit>, diff: Option<&DiffIneqAudit>) -> String {
    let mut rows = Vec::new();
    if let Some(g) = growth {
        fit_rows(&g.exponential, &mut rows);
        if let Some(d) = &g.double_exponential {
            fit_rows(d, &mut rows);
        }
    }
    if let Some(d) = diff {
        fit_rows(&d.regression, &mut rows);
        let w = &d.regression.window;
        for (name, v) in [("c4_fit", d.c4_fit), ("growth_exponent", d.growth_exponent.unwrap_or(f64::NAN))] {
            rows.push(vec!["DiffIneq".into(), name.into(), num(v), num(v), num(v), num(f64::NAN), num(w.0), num(w.1)]);
        }
    }
    csv_table(&FIT_HEADER, &rows)
}

fn fit_summary(growth: &Result<GrowthFit, vssc::Error>, diff: &Result<DiffIneqAudit, vssc::Error>) -> String {
    let mut s = String::new();
    match growth {
        Ok(g) => {
            s.push_str(&format!(
                "exponential rate: {:.6e} (meets 0.9 epsilon: {})\n",
                g.rate, g.meets_exponential_bound
            ));
            if let Some(d) = &g.double_exponential {
                for p in &d.params {
                    s.push_str(&format!("double exponential {}: {:.6e} [{:.6e}, {:.6e}]\n", p.name, p.value, p.lo, p.hi));
                }
            }
        }
        Err(e) => s.push_str(&format!("growth fit unavailable: {e}\n")),
    }
    match diff {
        Ok(d) => s.push_str(&format!(
            "c4_fit: {:.6e}; floor respected: {}; growth exponent: {}\n",
            d.c4_fit,
            d.floor_respected,
            d.growth_exponent.map_or("none".into(), |g| format!("{g:.6e}"))
        )),
        Err(e) => s.push_str(&format!("differential inequality audit unavailable: {e}\n")),
    }
    s
}

pub fn cmd_analyze(cfg: &RunConfig, out: &Path, inputs: &[PathBuf]) -> CliResult<Outcome> {
    let art = Artifacts::new(out, cfg)?;
    let params = cfg.params();
    let checkpoints = if inputs.is_empty() { find_checkpoints(out)? } else { inputs.to_vec() };
    if checkpoints.is_empty() {
        return Err(CliError::Input(format!("no checkpoints under {}", out.join(CHECKPOINT_DIR).display())));
    }
    let omega0 = initial_vorticity(&params)?;
    let mut ws = SpectralWorkspace::new(&params.torus_grid()?);
    let k0 = kinetic_energy(&biot_savart(&mut ws, &omega0)?);
    let mut files = vec![art.echo_config(cfg)?];
    let (mut trap_rows, mut rem_rows, mut sector_rows) = (Vec::new(), Vec::new(), Vec::new());
    let mut last_history: Option<Vec<BracketSample>> = None;
    for path in &checkpoints {
        let ck = read_checkpoint(path)?;
        let aux = read_sidecar(path)?;
        if ck.epsilon != params.epsilon || ck.field.grid() != &params.strip_grid()? {
            return Err(CliError::Input(format!(
                "{}: checkpoint (epsilon {}, {}x{}) does not match the configuration",
                path.display(),
                ck.epsilon,
                ck.field.grid().n1(),
                ck.field.grid().n2()
            )));
        }
        let step = aux.step;
        let u = biot_savart(&mut ws, &ck.field)?;
        let (samples, fit) = keylemma_samples(
            &ck.field,
            &u,
            params.epsilon,
            k0,
            cfg.analyze.key_lemma_points,
            params.seed,
        )?;
        files.push(art.write_csv(&format!("keylemma_{step:08}.csv"), &keylemma_csv(&samples))?);
        rem_rows.push(vec![
            step.to_string(),
            num(ck.t),
            num(fit.c0),
            num(fit.c0_vorticity),
            num(fit.c0_energy),
            num(fit.ratio_span),
        ]);
        let (a, b) = (aux.brackets.a, aux.brackets.b);
        match trapezoid_check(&ck.field, a, b, params.epsilon, params.omega_tol) {
            Ok(v) => trap_rows.push(vec![
                step.to_string(),
                num(ck.t),
                num(a),
                num(b),
                v.cells.to_string(),
                v.violations.to_string(),
                num(v.fraction),
                v.pass.to_string(),
                String::new(),
            ]),
            Err(e) => trap_rows.push(vec![
                step.to_string(),
                num(ck.t),
                num(a),
                num(b),
                "0".into(),
                "0".into(),
                num(f64::NAN),
                "false".into(),
                e.to_string().replace(',', ";"),
            ]),
        }
        let vg = VelocityGrid::from_strip(&u)?;
        let signs = sector_signs(&vg, params.epsilon, params.delta, ck.field.grid().h1())?;
        let pts = ball_points(params.delta, cfg.analyze.sector_points, params.seed);
        let sec = sector_lower_bound_check(&ck.field, params.epsilon, params.delta, params.omega_tol, &pts, 0.01)?;
        sector_rows.push(vec![
            step.to_string(),
            num(ck.t),
            num(signs.min_u1_ratio),
            num(signs.min_u2_diagonal),
            num(sec.exceptional_area),
            sec.applicable.to_string(),
            num(sec.floor),
            num(sec.min_q),
            sec.pass.to_string(),
        ]);
        last_history = Some(aux.brackets.history);
    }
    files.push(art.write_csv(
        "trapezoid.csv",
        &csv_table(&["step", "t", "a", "b", "cells", "violations", "fraction", "pass", "error"], &trap_rows),
    )?);
    files.push(art.write_csv(
        "remainder.csv",
        &csv_table(&["step", "t", "c0", "c0_vorticity", "c0_energy", "ratio_span"], &rem_rows),
    )?);
    files.push(art.write_csv(
        "sector.csv",
        &csv_table(
            &["step", "t", "min_u1_ratio", "min_u2_diagonal", "exceptional_area", "applicable", "floor", "min_q", "pass"],
            &sector_rows,
        ),
    )?);

    let report_path = out.join("report.csv");
    let growth = if report_path.exists() {
        growth_fit(&GrowthReport::load(&report_path)?, params.epsilon, cfg.analyze.window.map(|[a, b]| (a, b)))
    } else {
        Err(vssc::Error::InsufficientSamples(format!("{} not found", report_path.display())))
    };
    let history = last_history.unwrap_or_default();
    let diff = diffineq_audit(&history, params.epsilon);
    files.push(art.write_csv("fits.csv", &fits_table(growth.as_ref().ok(), diff.as_ref().ok()))?);
    let (a_star, c3) = c3_constant(200);
    files.push(art.write_csv("constants.csv", &csv_table(&["name", "value", "argmax_a"], &[vec!["c3".into(), num(c3), num(a_star)]]))?);

    let mut summary = art.stamp("#");
    summary.push_str(&format!("checkpoints analysed: {}\n", checkpoints.len()));
    for r in &trap_rows {
        summary.push_str(&format!("trapezoid step {}: pass {} {}\n", r[0], r[7], r[8]));
    }
    summary.push_str(&fit_summary(&growth, &diff));
    summary.push_str(&format!("c3: {c3:.6e} at a = {a_star:.3e}\n"));
    files.push(art.write("analyze_summary.txt", &summary)?);
    Ok(Outcome { pass: true, summary, files })
}

fn meta_or(report: &GrowthReport, key: &str, fallback: f64) -> f64 {
    report.meta(key).and_then(|v| v.parse().ok()).unwrap_or(fallback)
}

pub fn cmd_report(cfg: &RunConfig, out: &Path, input: Option<&Path>) -> CliResult<Outcome> {
    let art = Artifacts::new(out, cfg)?;
    let path = input.map(Path::to_path_buf).unwrap_or_else(|| out.join("report.csv"));
    let report = GrowthReport::load(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let eps = meta_or(&report, "epsilon", cfg.epsilon);
    let kappa = meta_or(&report, "kappa", cfg.kappa);
    let delta = meta_or(&report, "delta", cfg.delta);
    let growth = growth_fit(&report, eps, cfg.analyze.window.map(|[a, b]| (a, b)));
    let history: Vec<BracketSample> = report
        .samples
        .iter()
        .map(|s| BracketSample { t: s.t, a: s.a, b: s.b, log_ratio: s.log_ratio() })
        .collect();
    let diff = diffineq_audit(&history, eps);
    let drifts = conservation_audit(&report, cfg.drift_tol);
    let stamp = art.stamp("#");
    let mut files = vec![
        art.echo_config(cfg)?,
        art.write_csv("fits.csv", &fits_table(growth.as_ref().ok(), diff.as_ref().ok()))?,
        art.write_csv("conservation.csv", &drift_csv(&drifts))?,
    ];

    let t: Vec<f64> = report.samples.iter().map(|s| s.t).collect();
    let series = |label: &str, f: &dyn Fn(usize) -> f64| Series {
        label: label.into(),
        points: (0..t.len()).map(|k| (t[k], f(k))).collect(),
    };
    let s = &report.samples;
    let mut plots = vec![
        (
            "grad_sup.svg",
            line_plot(
                "sup |grad omega|",
                "t",
                "sup |grad omega|",
                &[series("measured", &|k| s[k].grad_sup)],
                true,
                &stamp,
            ),
        ),
        (
            "eta1.svg",
            line_plot(
                "boundary particle",
                "t",
                "eta1",
                &[series("eta1", &|k| s[k].eta1), series("delta exp(-epsilon t)", &|k| delta * (-eps * t[k]).exp())],
                true,
                &stamp,
            ),
        ),
        (
            "brackets.svg",
            line_plot(
                "brackets",
                "t",
                "position",
                &[
                    series("a", &|k| s[k].a),
                    series("b", &|k| s[k].b),
                    series("kappa exp(-epsilon t)", &|k| kappa * (-eps * t[k]).exp()),
                ],
                true,
                &stamp,
            ),
        ),
    ];
    let mut lr = vec![series("log(b/a)", &|k| s[k].log_ratio())];
    if let Ok(d) = &diff {
        lr.push(Series { label: "floor".into(), points: d.floor.iter().map(|(t, _, f)| (*t, *f)).collect() });
    }
    plots.push(("log_ratio.svg", line_plot("log(b/a)", "t", "log(b/a)", &lr, false, &stamp)));
    if let Some(s0) = s.first() {
        let rel = |a: f64, b: f64| if b != 0.0 { (a - b).abs() / b.abs() } else { a.abs() };
        plots.push((
            "conservation.svg",
            line_plot(
                "relative drift",
                "t",
                "drift",
                &[
                    series("l1", &|k| rel(s[k].l1, s0.l1)),
                    series("l2", &|k| rel(s[k].l2, s0.l2)),
                    series("linf", &|k| rel(s[k].linf, s0.linf)),
                    series("kinetic", &|k| rel(s[k].kinetic, s0.kinetic)),
                ],
                false,
                &stamp,
            ),
        ));
    }
    for (name, svg) in &plots {
        files.push(art.write(name, svg)?);
    }
    let mut summary = stamp.clone();
    summary.push_str(&format!("input: {}\nsamples: {}\nepsilon: {eps}\n", path.display(), s.len()));
    summary.push_str(&fit_summary(&growth, &diff));
    for d in &drifts {
        summary.push_str(&format!("drift {:<8} {:.3e}\n", d.quantity, d.max_drift));
    }
    files.push(art.write("report_summary.txt", &summary)?);
    Ok(Outcome { pass: true, summary, files })
}

pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> CliResult<Outcome> {
    let art = Artifacts::new(out, cfg)?;
    let points: Vec<(f64, usize)> = cfg
        .sweep
        .epsilons
        .iter()
        .flat_map(|&e| cfg.sweep.resolutions.iter().map(move |&n| (e, n)))
        .collect();
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .map(|&(eps, n)| {
            let dir = out.join("sweep").join(format!("eps{eps}_n{n}"));
            let res = sweep_point(cfg, eps, n, &dir);
            let mut row = vec![num(eps), n.to_string()];
            match res {
                Ok(mut r) => {
                    row.append(&mut r);
                    row.push(String::new());
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(num(f64::NAN), 7));
                    row.push(e.to_string().replace(',', ";"));
                }
            }
            row
        })
        .collect();
    let header = [
        "epsilon", "n", "steps", "k0", "epsilon0", "rate", "max_drift", "final_log_ratio", "max_parity_violation", "error",
    ];
    let files = vec![art.echo_config(cfg)?, art.write_csv("sweep.csv", &csv_table(&header, &rows))?];
    let failed = rows.iter().filter(|r| !r[9].is_empty()).count();
    let summary = format!("{}sweep points: {}, failed: {failed}\n", art.stamp("#"), rows.len());
    Ok(Outcome { pass: failed == 0, summary, files })
}

fn sweep_point(cfg: &RunConfig, eps: f64, n: usize, dir: &Path) -> CliResult<Vec<String>> {
    let sub = cfg.with_point(eps, n)?;
    log::info!("sweep point epsilon = {eps}, n = {n}");
    let art = Artifacts::new(dir, &sub)?;
    let params = sub.params();
    let mut result = run(&params, &run_options(&sub, None))?;
    stamp_report(&mut result.report, &art);
    art.echo_config(&sub)?;
    result.report.save(&art.path("report.csv"))?;
    let rate = growth_fit(&result.report, eps, None).map_or(f64::NAN, |g| g.rate);
    let drift = conservation_audit(&result.report, params.drift_tol).iter().map(|d| d.max_drift).fold(0.0, f64::max);
    Ok(vec![
        params.steps().to_string(),
        num(result.k0),
        num(result.budget.epsilon0),
        num(rate),
        num(drift),
        num(result.brackets.log_ratio()),
        num(result.max_parity_violation),
    ])
}
