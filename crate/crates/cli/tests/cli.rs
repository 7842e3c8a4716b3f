use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vssc_cli::svg::embedded_data;

fn vssc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vssc"))
        .args(args)
        .env_remove("VSSC_OUT_DIR")
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn body(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/double_exponential.csv")
}

const SMALL: &str = "n1 = 32\nn2 = 32\nt_end = 1.25\n[output]\noutput_every = 1\ncheckpoint_every = 2\n";

#[test]
fn default_verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = vssc(&["verify", "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}\n{}", String::from_utf8_lossy(&o.stdout), stderr(&o));
    for f in ["config.toml", "verify.csv", "keylemma_t0.csv", "verify_summary.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(!out.join(".vssc.lock").exists());
    let v = fs::read_to_string(out.join("verify.csv")).unwrap();
    assert!(v.starts_with("# config_hash: "));
    assert!(!body(&out.join("verify.csv")).contains(",false"));
}

#[test]
fn zero_symmetry_tolerance_fails_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(tmp.path(), "c.toml", "sym_tol = 0.0\n");
    let o = vssc(&["verify", "--suite", "symmetry", "--config", c.to_str().unwrap(), "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn strict_gate_rejects_large_epsilon() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(tmp.path(), "c.toml", "epsilon = 2.0\nn1 = 64\nn2 = 64\nstrict_gate = true\n");
    let o = vssc(&["verify", "--suite", "gate", "--config", c.to_str().unwrap(), "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = vssc(&["run", "--config", c.to_str().unwrap(), "--out", "r"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!tmp.path().join("r/report.csv").exists());
}

#[test]
fn config_errors_exit_two_with_position() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(tmp.path(), "c.toml", "epsilon = 0.5\nkapa = 0.1\n");
    let o = vssc(&["verify", "--config", c.to_str().unwrap(), "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("line 2, column 1") && e.contains("kapa"), "{e}");

    let c = config(tmp.path(), "d.toml", "kappa = 0.2\ndelta = 0.1\n");
    let o = vssc(&["verify", "--config", c.to_str().unwrap(), "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("0 < kappa < delta < 1/2"), "{}", stderr(&o));
}

#[test]
fn analyze_at_time_zero_matches_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(tmp.path(), "c.toml", "n1 = 128\nn2 = 128\nt_end = 0.0\n");
    let c = c.to_str().unwrap();
    let o = vssc(&["verify", "--suite", "keylemma", "--config", c, "--out", "v"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = vssc(&["run", "--config", c, "--out", "r"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = vssc(&["analyze", "--config", c, "--out", "r"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = body(&tmp.path().join("r/keylemma_00000000.csv"));
    assert_eq!(a, body(&tmp.path().join("v/keylemma_t0.csv")));
    assert!(a.lines().count() > 60);
}

#[test]
fn resumed_run_reproduces_report() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(tmp.path(), "c.toml", SMALL);
    let c = c.to_str().unwrap();
    let o = vssc(&["run", "--config", c, "--out", "full"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = body(&tmp.path().join("full/report.csv"));
    let o = vssc(&["run", "--config", c, "--out", "again"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&tmp.path().join("again/report.csv")), first);
    for f in ["brackets.csv", "tracer.csv", "conservation.csv"] {
        assert_eq!(body(&tmp.path().join("again").join(f)), body(&tmp.path().join("full").join(f)), "{f}");
    }
    // Both runs share a hash although their directories differ.
    let hash = |d: &str| fs::read_to_string(tmp.path().join(d).join("report.csv")).unwrap().lines().find(|l| l.contains("config_hash")).map(str::to_string);
    assert_eq!(hash("full"), hash("again"));

    let mid = tmp.path().join("full/checkpoints/checkpoint_00000002.vssc");
    assert!(mid.exists(), "{:?}", fs::read_dir(tmp.path().join("full/checkpoints")).unwrap().collect::<Vec<_>>());
    let o = vssc(&["run", "--config", c, "--out", "resumed", "--resume", mid.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(body(&tmp.path().join("resumed/report.csv")), first);
}

#[test]
fn corrupt_checkpoint_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(tmp.path(), "c.toml", SMALL);
    let c = c.to_str().unwrap();
    assert_eq!(vssc(&["run", "--config", c, "--out", "o"], tmp.path()).status.code(), Some(0));
    let ck = tmp.path().join("o/checkpoints/checkpoint_00000002.vssc");
    let good = fs::read(&ck).unwrap();
    let mut bad_magic = good.clone();
    bad_magic[0] = b'X';
    let mut bad_version = good.clone();
    bad_version[4] = 7;
    for (bytes, reason) in [(bad_magic, "magic"), (bad_version, "version"), (good[..good.len() - 8].to_vec(), "value bytes")] {
        fs::write(&ck, &bytes).unwrap();
        let o = vssc(&["analyze", "--config", c, "--out", "o", ck.to_str().unwrap()], tmp.path());
        assert_eq!(o.status.code(), Some(1));
        let e = stderr(&o);
        assert!(e.contains("checkpoint_00000002.vssc") && e.contains(reason), "{e}");
    }
    let o = vssc(&["run", "--config", c, "--out", "p", "--resume", ck.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("checkpoint_00000002.vssc"), "{}", stderr(&o));
}

#[test]
fn analyze_writes_audits_for_every_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(tmp.path(), "c.toml", SMALL);
    let c = c.to_str().unwrap();
    assert_eq!(vssc(&["run", "--config", c, "--out", "o"], tmp.path()).status.code(), Some(0));
    let o = vssc(&["analyze", "--config", c, "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let n_ck = fs::read_dir(tmp.path().join("o/checkpoints"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "vssc"))
        .count();
    assert!(n_ck >= 3);
    for f in ["trapezoid.csv", "remainder.csv", "sector.csv"] {
        assert_eq!(body(&tmp.path().join("o").join(f)).lines().count(), n_ck + 1, "{f}");
    }
    let consts = body(&tmp.path().join("o/constants.csv"));
    assert!(consts.starts_with("name,value,argmax_a\nc3,"));

    let other = config(tmp.path(), "e.toml", &SMALL.replace("n1 = 32\nn2 = 32", "n1 = 64\nn2 = 64"));
    let o = vssc(&["analyze", "--config", other.to_str().unwrap(), "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not match"), "{}", stderr(&o));
}

#[test]
fn report_recovers_double_exponential_rate() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vssc(&["report", "--input", fixture().to_str().unwrap(), "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fits = body(&tmp.path().join("o/fits.csv"));
    let get = |param: &str| -> f64 {
        let line = fits.lines().find(|l| l.starts_with("DoubleExponential,") && l.split(',').nth(1) == Some(param)).unwrap();
        line.split(',').nth(2).unwrap().parse().unwrap()
    };
    let eps = 0.5;
    let pi = std::f64::consts::PI;
    assert!((get("inner_rate") - eps / pi).abs() <= 0.01 * eps / pi, "{}", get("inner_rate"));
    assert!((get("c2") - 1.0 / pi).abs() <= 0.01 / pi);
    assert!((get("c1") - 2.0).abs() <= 0.02);

    let hash_line = fs::read_to_string(tmp.path().join("o/fits.csv")).unwrap().lines().next().unwrap().to_string();
    for f in ["grad_sup.svg", "eta1.svg", "brackets.svg", "log_ratio.svg", "conservation.svg"] {
        let svg = fs::read_to_string(tmp.path().join("o").join(f)).unwrap();
        assert!(svg.contains(&format!("<!-- {hash_line} -->")), "{f}");
        let data = embedded_data(&svg);
        assert!(!data.is_empty() && data[0].len() == 41, "{f}");
    }
    let g = embedded_data(&fs::read_to_string(tmp.path().join("o/grad_sup.svg")).unwrap());
    assert!((g[0][4].1 - eps * (2.0 * (eps * 1.0 / pi).exp()).exp()).abs() < 1e-12);
}

#[test]
fn report_of_missing_input_names_it() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vssc(&["report", "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("report.csv"), "{}", stderr(&o));
}

#[test]
fn sweep_writes_one_row_per_point() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(
        tmp.path(),
        "c.toml",
        "t_end = 0.5\n[output]\ncheckpoint_every = 0\n[sweep]\nepsilons = [0.25, 0.5]\nresolutions = [16, 32]\n",
    );
    let c = c.to_str().unwrap();
    let o = vssc(&["sweep", "--config", c, "--out", "s"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = body(&tmp.path().join("s/sweep.csv"));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 5, "{table}");
    assert!(lines[0].starts_with("epsilon,n,steps,"));
    for (line, (e, n)) in lines[1..].iter().zip([(0.25, 16), (0.25, 32), (0.5, 16), (0.5, 32)]) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<f64>().unwrap(), e);
        assert_eq!(f[1], n.to_string());
        assert_eq!(f.last(), Some(&""), "{line}");
        assert!(tmp.path().join(format!("s/sweep/eps{e}_n{n}/report.csv")).exists());
    }
    let o = vssc(&["sweep", "--config", c, "--out", "s2"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&tmp.path().join("s2/sweep.csv")), table);
}

#[test]
fn locked_output_directory_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join(".vssc.lock"), "1\n").unwrap();
    let o = vssc(&["report", "--input", fixture().to_str().unwrap(), "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("in use"), "{}", stderr(&o));
    assert!(!out.join("fits.csv").exists());
    assert!(out.join(".vssc.lock").exists());
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_vssc"))
        .args(["report", "--input", fixture().to_str().unwrap()])
        .env("VSSC_OUT_DIR", &out)
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("fits.csv").exists());
    assert!(!tmp.path().join("out").exists());

    let flag = tmp.path().join("from_flag");
    let o = Command::new(env!("CARGO_BIN_EXE_vssc"))
        .args(["report", "--input", fixture().to_str().unwrap(), "--out", flag.to_str().unwrap()])
        .env("VSSC_OUT_DIR", &out)
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(flag.join("fits.csv").exists());
}
