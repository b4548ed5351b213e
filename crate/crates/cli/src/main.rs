//! `rnls`: compute action ground states of rotating NLS equations.
//!
//! Exit codes: 0 a stopping rule was met; 1 config or usage error; 2
//! numerical blowup; 3 decay violation under strict checking; 4
//! inadmissible omega under `--strict-admissibility`; 5 iteration budget
//! exhausted.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use rnls_cli::config::{self, ReferenceSpec};
use rnls_cli::runner::{self, RunOptions, SweepAxis};
use rnls_cli::{error_exit, termination_exit, CliError};
use rnls_core::dgf::DecayCheck;
use rnls_core::{check_admissibility, Grid};

#[derive(Parser)]
#[command(
    name = "rnls",
    version,
    about = "Ground states of rotating nonlinear Schrodinger equations by stabilized gradient flow"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Refuse to run when omega is not strictly below -lambda0.
    #[arg(long, global = true)]
    strict_admissibility: bool,

    /// Override the config's decay check: off, warn or strict.
    #[arg(long, global = true, value_parser = parse_decay_flag)]
    decay_check: Option<DecayCheck>,

    /// Omit the timestamp header line from records.csv.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment from a config file.
    Solve { config: PathBuf },

    /// Run the experiment once per value of one parameter.
    Sweep {
        config: PathBuf,

        /// Parameter to sweep: tau, omega or Omega (case matters).
        #[arg(long, value_parser = parse_axis)]
        axis: SweepAxis,

        /// Comma-separated values, e.g. --values 1,0.5,0.2,0.1
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
    },

    /// Solve a 1d problem against its closed form and tabulate the error.
    #[command(name = "verify-1d")]
    Verify1d { config: PathBuf },

    /// Estimate the ground level lambda0 and the admissibility gap.
    Lambda0 { config: PathBuf },
}

fn parse_decay_flag(s: &str) -> Result<DecayCheck, String> {
    config::parse_decay_check(s).ok_or_else(|| format!("expected off, warn or strict, got {s:?}"))
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    SweepAxis::parse(s)
        .ok_or_else(|| format!("expected tau, omega or Omega (case matters), got {s:?}"))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(real_main(cli));
}

fn real_main(cli: Cli) -> i32 {
    let opts = RunOptions {
        strict_admissibility: cli.strict_admissibility,
        decay_override: cli.decay_check,
        timestamp: !cli.no_timestamp,
    };
    let outcome = match &cli.cmd {
        Cmd::Solve { config } => solve(config, &opts),
        Cmd::Sweep { config, axis, values } => sweep(config, *axis, values, &opts),
        Cmd::Verify1d { config } => verify_1d(config, &opts),
        Cmd::Lambda0 { config } => lambda0(config, cli.strict_admissibility),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit(&e)
        }
    }
}

fn solve(path: &PathBuf, opts: &RunOptions) -> Result<i32, CliError> {
    let config = config::load_config(path)?;
    let execution = runner::execute(&config, opts)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&execution.summary).expect("summary serializes")
    );
    Ok(termination_exit(execution.run.termination))
}

fn sweep(path: &PathBuf, axis: SweepAxis, values: &[f64], opts: &RunOptions) -> Result<i32, CliError> {
    let config = config::load_config(path)?;
    let entries = runner::run_sweep(&config, axis, values, opts)?;
    let mut code = 0;
    for entry in &entries {
        match &entry.result {
            Ok(summary) => {
                println!(
                    "{}={}: {} in {} iterations, final S = {}",
                    axis.key(),
                    entry.value,
                    summary.termination,
                    summary.iterations,
                    summary.final_s
                );
                let t = parse_termination(&summary.termination);
                if code == 0 {
                    code = termination_exit(t);
                }
            }
            Err(e) => {
                println!("{}={}: error: {e}", axis.key(), entry.value);
                if code == 0 {
                    code = error_exit(e);
                }
            }
        }
    }
    println!(
        "rates written to {}",
        config.outputs.directory.join("rates.csv").display()
    );
    Ok(code)
}

fn parse_termination(name: &str) -> rnls_core::dgf::Termination {
    use rnls_core::dgf::Termination::*;
    match name {
        "ResidualMet" => ResidualMet,
        "ActionIncrementMet" => ActionIncrementMet,
        "DecayViolation" => DecayViolation,
        _ => MaxIters,
    }
}

fn verify_1d(path: &PathBuf, opts: &RunOptions) -> Result<i32, CliError> {
    let mut config = config::load_config(path)?;
    if config.params.dimension != 1 {
        return Err(CliError::Config(
            "verify-1d needs a 1d config (the closed form is one-dimensional)".into(),
        ));
    }
    config.reference = ReferenceSpec::Analytic1D;
    let execution = runner::execute(&config, opts)?;
    let s_ref = execution.s_ref.expect("reference was forced above");

    println!("{:>9} {:>18} {:>18}", "n", "dist_to_ref", "S_gap");
    for r in &execution.run.records {
        let dist = r.dist_to_ref.expect("reference distances are recorded");
        println!("{:>9} {:>18.6e} {:>18.6e}", r.n, dist, r.s - s_ref);
    }
    let s = &execution.summary;
    println!(
        "{} after {} iterations; final dist_to_ref = {:.3e}, S_gap = {:.3e}",
        s.termination,
        s.iterations,
        s.final_dist_to_ref.unwrap_or(f64::NAN),
        s.final_s - s_ref
    );
    Ok(termination_exit(execution.run.termination))
}

#[derive(Serialize)]
struct Lambda0Report {
    omega: f64,
    lambda0_estimate: f64,
    gap: f64,
    admissible: bool,
}

fn lambda0(path: &PathBuf, strict: bool) -> Result<i32, CliError> {
    let config = config::load_config(path)?;
    let grid = Grid::build(config.grid.clone())?;
    let adm = check_admissibility(&config.params, &grid)?;
    let report = Lambda0Report {
        omega: config.params.omega,
        lambda0_estimate: adm.lambda0_estimate,
        gap: adm.gap,
        admissible: adm.admissible,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if strict && !adm.admissible {
        return Err(CliError::Inadmissible {
            omega: config.params.omega,
            minus_lambda0: -adm.lambda0_estimate,
        });
    }
    Ok(0)
}
