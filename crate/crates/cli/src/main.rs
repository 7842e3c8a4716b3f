use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vssc_cli::{
    cmd_analyze, cmd_report, cmd_run, cmd_sweep, cmd_verify, parse_config, CliError, CliResult, OutputLock, RunConfig,
};

/// Small-scale creation experiments for 2D Euler flow on the periodic strip.
#[derive(Debug, Parser)]
#[command(name = "vssc", version)]
struct Cli {
    /// Configuration file; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides VSSC_OUT_DIR and the configuration.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the t = 0 invariant suites.
    Verify {
        /// Comma-separated subset of suites.
        #[arg(long, value_delimiter = ',', value_name = "NAME[,NAME...]")]
        suite: Option<Vec<String>>,
    },
    /// Evolve the vorticity and write the report and checkpoints.
    Run {
        /// Continue from this checkpoint.
        #[arg(long, value_name = "CHECKPOINT")]
        resume: Option<PathBuf>,
    },
    /// Audit checkpoints of a run: key lemma, trapezoid, sector, fits.
    Analyze {
        /// Checkpoints to analyse; all under OUT/checkpoints when omitted.
        checkpoints: Vec<PathBuf>,
    },
    /// Fit and plot a report CSV.
    Report {
        /// Report to read; OUT/report.csv when omitted.
        #[arg(long, value_name = "CSV")]
        input: Option<PathBuf>,
    },
    /// Independent runs over the configured grid of epsilon and n.
    Sweep,
}

fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        None => String::new(),
    };
    Ok(parse_config(&text)?)
}

fn out_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os("VSSC_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| cfg.output.dir.clone())
}

fn execute(cli: &Cli) -> CliResult<bool> {
    let mut cfg = load_config(cli.config.as_deref())?;
    let out = out_dir(cli, &cfg);
    cfg.output.dir = out.clone();
    let _lock = OutputLock::acquire(&out)?;
    let outcome = match &cli.command {
        Command::Verify { suite } => cmd_verify(&cfg, &out, suite.as_deref())?,
        Command::Run { resume } => cmd_run(&cfg, &out, resume.as_deref())?,
        Command::Analyze { checkpoints } => cmd_analyze(&cfg, &out, checkpoints)?,
        Command::Report { input } => cmd_report(&cfg, &out, input.as_deref())?,
        Command::Sweep => cmd_sweep(&cfg, &out)?,
    };
    print!("{}", outcome.summary);
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
