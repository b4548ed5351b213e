//! Experiment orchestration: one run, its artifacts, and parameter sweeps.
//!
//! A run builds the grid and problem from an [`ExperimentConfig`], checks
//! admissibility, drives the gradient flow, and writes up to three
//! artifacts into the config's output directory:
//!
//! * `records.csv`: the per-iteration diagnostics, fixed column order;
//! * `summary.json`: termination, final functionals, fitted decay rate;
//! * `final.field`: the converged state in the binary field format.
//!
//! The summary mirrors the last CSV record exactly; nothing is recomputed
//! from the field, so the two artifacts cannot drift apart.

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rnls_core::dgf::{self, DecayCheck, RunResult};
use rnls_core::ops::{self, Problem};
use rnls_core::{check_admissibility, elliptic1d, initial_data, metrics, Field, Grid};
use serde::Serialize;

use crate::config::{ExperimentConfig, ReferenceSpec};
use crate::fieldfile;
use crate::CliError;

/// Command-line switches that modify a run without living in the config.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Refuse to run when omega fails the admissibility test (default is
    /// a warning on stderr).
    pub strict_admissibility: bool,
    /// Overrides the config's `dgf.decay_check`.
    pub decay_override: Option<DecayCheck>,
    /// Emit the timestamp header line in `records.csv`.
    pub timestamp: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            strict_admissibility: false,
            decay_override: None,
            timestamp: true,
        }
    }
}

/// Exponential fit of the action gap over the tail window.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FittedRate {
    pub rate_a: f64,
    pub prefactor_log_c: f64,
    pub r_squared: f64,
    pub window: (usize, usize),
}

/// Two-sided bound of (S - S_ref) / dist^2 over the tail window.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
}

/// Machine-readable outcome of one run. Final values are copied verbatim
/// from the last iteration record.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub termination: String,
    pub iterations: usize,
    pub final_s: f64,
    pub final_k: f64,
    pub final_residual_max: f64,
    pub final_residual_hminus1: f64,
    pub final_dist_to_ref: Option<f64>,
    pub fitted_rate: Option<FittedRate>,
    pub equivalence_band: Option<Band>,
    pub wall_time_seconds: f64,
}

/// A finished run with everything the subcommands need beyond the
/// summary: the full record list and the reference action, if any.
pub struct Execution {
    pub summary: Summary,
    pub run: RunResult,
    pub s_ref: Option<f64>,
}

/// Runs one experiment and writes its artifacts.
pub fn execute(config: &ExperimentConfig, opts: &RunOptions) -> Result<Execution, CliError> {
    let t0 = Instant::now();
    let params = &config.params;
    let grid = Grid::build(config.grid.clone())?;
    let prob = Problem::new(params.clone(), grid.clone())?;

    match check_admissibility(params, &grid) {
        Ok(adm) if !adm.admissible => {
            if opts.strict_admissibility {
                return Err(CliError::Inadmissible {
                    omega: params.omega,
                    minus_lambda0: -adm.lambda0_estimate,
                });
            }
            eprintln!(
                "warning: omega = {} is not below -lambda0 = {} (gap {:.3e}); \
                 the flow may sink toward zero",
                params.omega, -adm.lambda0_estimate, adm.gap
            );
        }
        Ok(_) => {}
        Err(e) => {
            if opts.strict_admissibility {
                return Err(e.into());
            }
            eprintln!("warning: admissibility estimate failed ({e}); proceeding unchecked");
        }
    }

    let u0 = initial_data(config.initial, &grid, params)?;
    let reference: Option<Field> = match &config.reference {
        ReferenceSpec::None => None,
        ReferenceSpec::Analytic1D => Some(elliptic1d::analytic_gs_1d(&grid, params.omega)?),
        ReferenceSpec::FieldFile(path) => {
            let f = fieldfile::read_field(path)?;
            if f.grid().spec() != grid.spec() {
                return Err(CliError::Config(format!(
                    "reference field grid {:?} does not match the run grid {:?}",
                    f.grid().spec(),
                    grid.spec()
                )));
            }
            Some(f)
        }
    };

    let mut dgf_cfg = config.dgf.clone();
    if let Some(mode) = opts.decay_override {
        dgf_cfg.decay_check = mode;
    }
    let run = dgf::run_dgf(&u0, &dgf_cfg, &prob, reference.as_ref())?;
    let wall_time_seconds = t0.elapsed().as_secs_f64();

    let s_ref = match &reference {
        Some(r) => Some(ops::functionals(r, &prob)?.s),
        None => None,
    };
    let last = run.records.last().expect("the driver always records the final state");
    let fit_origin = s_ref.unwrap_or(last.s);
    let series: Vec<(usize, f64)> = run.records.iter().map(|r| (r.n, r.s - fit_origin)).collect();
    let fitted_rate = metrics::fit_exponential_rate(&series).ok().map(|f| FittedRate {
        rate_a: f.rate_a,
        prefactor_log_c: f.prefactor_log_c,
        r_squared: f.r_squared,
        window: f.window,
    });
    let equivalence_band = s_ref
        .and_then(|sr| metrics::sgap_dist_equivalence(&run.records, sr).ok())
        .map(|(lower, upper)| Band { lower, upper });

    let summary = Summary {
        termination: format!("{:?}", run.termination),
        iterations: run.iterations_used,
        final_s: last.s,
        final_k: last.k,
        final_residual_max: last.residual_max,
        final_residual_hminus1: last.residual_hminus1,
        final_dist_to_ref: last.dist_to_ref,
        fitted_rate,
        equivalence_band,
        wall_time_seconds,
    };

    let out = &config.outputs;
    if out.emit_records || out.emit_summary || out.emit_field {
        std::fs::create_dir_all(&out.directory)?;
    }
    if out.emit_records {
        write_records_csv(&out.directory.join("records.csv"), &run.records, opts.timestamp)?;
    }
    if out.emit_summary {
        let mut text = serde_json::to_string_pretty(&summary)
            .expect("summary serialization cannot fail");
        text.push('\n');
        std::fs::write(out.directory.join("summary.json"), text)?;
    }
    if out.emit_field {
        fieldfile::write_field(&run.final_field, &out.directory.join("final.field"))?;
    }

    Ok(Execution { summary, run, s_ref })
}

/// [`execute`] reduced to its summary.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<Summary, CliError> {
    execute(config, opts).map(|e| e.summary)
}

/// Fixed CSV schema: one row per iteration record, `dist_to_ref` empty
/// when no reference was supplied. Floats print in shortest round-trip
/// form, so identical runs yield identical bytes; the timestamp header is
/// the single allowed exception and can be switched off.
pub fn write_records_csv(
    path: &Path,
    records: &[dgf::IterationRecord],
    timestamp: bool,
) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    if timestamp {
        writeln!(w, "# generated {}", chrono::Utc::now().to_rfc3339())?;
    }
    writeln!(
        w,
        "n,S,K,alpha_n,mu_l2,mu_h1,residual_max,residual_hminus1,phi_h1,dist_to_ref,decay_slack"
    )?;
    for r in records {
        let dist = r.dist_to_ref.map(|d| d.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.s,
            r.k,
            r.alpha_n,
            r.mu_l2,
            r.mu_h1,
            r.residual_max,
            r.residual_hminus1,
            r.phi_h1,
            dist,
            r.decay_slack
        )?;
    }
    w.flush()?;
    Ok(())
}

/// The swept parameter. `omega` and `Omega` differ only by case, exactly
/// as they do in the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Tau,
    ChemicalPotential,
    Rotation,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Option<SweepAxis> {
        match s {
            "tau" => Some(SweepAxis::Tau),
            "omega" => Some(SweepAxis::ChemicalPotential),
            "Omega" => Some(SweepAxis::Rotation),
            _ => None,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            SweepAxis::Tau => "tau",
            SweepAxis::ChemicalPotential => "omega",
            SweepAxis::Rotation => "Omega",
        }
    }
}

/// One sweep entry: the swept value and how its run ended.
pub struct SweepEntry {
    pub value: f64,
    pub result: Result<Summary, CliError>,
}

fn apply_axis(
    base: &ExperimentConfig,
    axis: SweepAxis,
    value: f64,
) -> Result<ExperimentConfig, CliError> {
    let mut config = base.clone();
    match axis {
        SweepAxis::Tau => config.dgf.tau = value,
        SweepAxis::ChemicalPotential | SweepAxis::Rotation => {
            let p = &base.params;
            let (rotation, omega) = match axis {
                SweepAxis::ChemicalPotential => (p.rotation, value),
                _ => (value, p.omega),
            };
            // Rebuild so the parameter constraints are re-checked for the
            // swept value.
            config.params = rnls_core::ModelParams::new(
                p.dimension,
                p.p,
                p.beta,
                rotation,
                omega,
                p.potential.clone(),
            )
            .map_err(|e| CliError::Config(format!("{} = {value}: {e}", axis.key())))?;
        }
    }
    config.outputs.directory = base
        .outputs
        .directory
        .join(format!("{}_{}", axis.key(), value));
    Ok(config)
}

fn pool_size(n_entries: usize) -> usize {
    let available = std::env::var("RNLS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        });
    available.min(n_entries).max(1)
}

/// Runs the same experiment once per value of the swept axis on a bounded
/// worker pool, one artifact directory per value, then writes a combined
/// `rates.csv` at the base output directory comparing the fitted decay
/// rates. Entry failures are recorded in their row; the sweep continues.
pub fn run_sweep(
    base: &ExperimentConfig,
    axis: SweepAxis,
    values: &[f64],
    opts: &RunOptions,
) -> Result<Vec<SweepEntry>, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    for (i, v) in values.iter().enumerate() {
        if values[..i].contains(v) {
            return Err(CliError::Config(format!(
                "sweep value {v} repeats; artifact directories would collide"
            )));
        }
    }

    let mut slots: Vec<Mutex<Option<Result<Summary, CliError>>>> = Vec::new();
    let mut configs: Vec<Option<ExperimentConfig>> = Vec::new();
    for &v in values {
        match apply_axis(base, axis, v) {
            Ok(c) => {
                slots.push(Mutex::new(None));
                configs.push(Some(c));
            }
            Err(e) => {
                slots.push(Mutex::new(Some(Err(e))));
                configs.push(None);
            }
        }
    }

    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..pool_size(values.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= configs.len() {
                    break;
                }
                if let Some(config) = &configs[i] {
                    let result = run_experiment(config, opts);
                    *slots[i].lock().unwrap() = Some(result);
                }
            });
        }
    });

    let entries: Vec<SweepEntry> = values
        .iter()
        .zip(slots)
        .map(|(&value, slot)| SweepEntry {
            value,
            result: slot.into_inner().unwrap().expect("every slot was filled"),
        })
        .collect();

    std::fs::create_dir_all(&base.outputs.directory)?;
    write_rates_csv(&base.outputs.directory.join("rates.csv"), axis, &entries)?;
    Ok(entries)
}

/// Rows follow the input value order, independent of which worker
/// finished first.
fn write_rates_csv(path: &Path, axis: SweepAxis, entries: &[SweepEntry]) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "{},termination,iterations,final_S,final_residual_hminus1,rate_a,r_squared,note",
        axis.key()
    )?;
    for entry in entries {
        match &entry.result {
            Ok(s) => {
                let (rate, r2) = match &s.fitted_rate {
                    Some(f) => (f.rate_a.to_string(), f.r_squared.to_string()),
                    None => (String::new(), String::new()),
                };
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},",
                    entry.value,
                    s.termination,
                    s.iterations,
                    s.final_s,
                    s.final_residual_hminus1,
                    rate,
                    r2
                )?;
            }
            Err(e) => {
                let note = e.to_string().replace([',', '\n'], ";");
                writeln!(w, "{},,,,,,,{note}", entry.value)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
