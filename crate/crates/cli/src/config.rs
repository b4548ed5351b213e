//! Flat `key = value` experiment configs with dotted section keys.
//!
//! The format is a plain text file, one assignment per line:
//!
//! ```text
//! # Comment lines start with '#'; blank lines are ignored.
//! model.dimension = 1
//! model.omega     = -10
//! grid.a1 = 0
//! grid.b1 = 1
//! grid.n1 = 128
//! dgf.tau = 0.1
//! output.directory = out/example1
//! ```
//!
//! Parsing is strict: unknown keys, duplicate keys and malformed values
//! are errors that name the offending line. Defaults exist only where the
//! spec of the experiment does not depend on them (tolerances, stride,
//! iteration budget); physically meaningful quantities (omega, tau, the
//! box) are mandatory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rnls_core::dgf::{AlphaMode, DecayCheck, DgfConfig, StopRule};
use rnls_core::{GridSpec, InitialKind, ModelParams, Potential};

use crate::CliError;

/// Reference state to measure distances against during the run.
#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceSpec {
    None,
    /// Closed-form 1d ground state on the run's own grid.
    Analytic1D,
    /// A previously written field file.
    FieldFile(PathBuf),
}

/// Artifact destinations and switches.
#[derive(Clone, Debug)]
pub struct OutputSpec {
    pub directory: PathBuf,
    pub emit_records: bool,
    pub emit_field: bool,
    pub emit_summary: bool,
}

/// One fully described experiment. `params` and `grid` are already
/// validated by their constructors; `dgf` is validated by the driver.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub grid: GridSpec,
    pub dgf: DgfConfig,
    pub initial: InitialKind,
    pub reference: ReferenceSpec,
    pub outputs: OutputSpec,
    /// Reserved for randomized harnesses; the solver itself never draws.
    pub seed: Option<u64>,
}

fn err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

/// Raw assignments with line numbers, consumed key by key so leftovers can
/// be rejected at the end.
struct Assignments {
    map: BTreeMap<String, (String, usize)>,
}

impl Assignments {
    fn parse(text: &str) -> Result<Assignments, CliError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(line_no, format!("expected `key = value`, got {line:?}")));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(err(line_no, "empty key"));
            }
            if let Some((_, first)) = map.get(&key) {
                return Err(err(
                    line_no,
                    format!("duplicate key `{key}` (first set on line {first})"),
                ));
            }
            map.insert(key, (value, line_no));
        }
        Ok(Assignments { map })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn take_parsed<T, F>(&mut self, key: &str, what: &str, parse: F) -> Result<Option<T>, CliError>
    where
        F: FnOnce(&str) -> Option<T>,
    {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => match parse(&value) {
                Some(v) => Ok(Some(v)),
                None => Err(err(line, format!("key `{key}`: expected {what}, got {value:?}"))),
            },
        }
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        self.take_parsed(key, "a finite number", |v| {
            v.parse::<f64>().ok().filter(|x| x.is_finite())
        })
    }

    fn require_f64(&mut self, key: &str) -> Result<f64, CliError> {
        self.take_f64(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        self.take_parsed(key, "a nonnegative integer", |v| v.parse::<usize>().ok())
    }

    fn require_usize(&mut self, key: &str) -> Result<usize, CliError> {
        self.take_usize(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>, CliError> {
        self.take_parsed(key, "true or false", |v| match v {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        })
    }

    /// Errors on anything not consumed. Reported in line order so the
    /// first surprise in the file comes first.
    fn finish(self) -> Result<(), CliError> {
        if self.map.is_empty() {
            return Ok(());
        }
        let mut leftovers: Vec<(usize, String)> = self
            .map
            .into_iter()
            .map(|(key, (_, line))| (line, key))
            .collect();
        leftovers.sort_unstable();
        let listed = leftovers
            .iter()
            .map(|(line, key)| format!("`{key}` (line {line})"))
            .collect::<Vec<_>>()
            .join(", ");
        Err(CliError::Config(format!("unknown keys: {listed}")))
    }
}

/// Parses config text. Paths inside the text are kept as written; use
/// [`load_config`] to resolve them against the config file's directory.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut a = Assignments::parse(text)?;

    // Model.
    let dimension = a.require_usize("model.dimension")?;
    let p = a.require_f64("model.p")?;
    let beta = a.require_f64("model.beta")?;
    let omega = a.require_f64("model.omega")?;
    let rotation = a.take_f64("model.Omega")?.unwrap_or(0.0);
    let potential = match a.take("model.potential") {
        None => Potential::Zero,
        Some((value, line)) => match value.as_str() {
            "zero" => Potential::Zero,
            "harmonic" => {
                let mut gammas = vec![a.require_f64("model.gamma1")?];
                if dimension == 2 {
                    gammas.push(a.require_f64("model.gamma2")?);
                }
                Potential::Harmonic { gammas }
            }
            other => {
                return Err(err(
                    line,
                    format!("key `model.potential`: expected zero or harmonic, got {other:?}"),
                ))
            }
        },
    };
    let params = ModelParams::new(dimension, p, beta, rotation, omega, potential)
        .map_err(|e| CliError::Config(format!("model section: {e}")))?;

    // Grid. The basis defaults to the boundary treatment the dimension
    // suggests: a Dirichlet box in 1d, a periodic torus in 2d.
    let basis = match a.take("grid.basis") {
        None => {
            if dimension == 1 {
                "sine".to_string()
            } else {
                "fourier".to_string()
            }
        }
        Some((value, line)) => match value.as_str() {
            "sine" | "fourier" => value,
            other => {
                return Err(err(
                    line,
                    format!("key `grid.basis`: expected sine or fourier, got {other:?}"),
                ))
            }
        },
    };
    let a1 = a.require_f64("grid.a1")?;
    let b1 = a.require_f64("grid.b1")?;
    let n1 = a.require_usize("grid.n1")?;
    let grid = match (dimension, basis.as_str()) {
        (1, "sine") => GridSpec::sine_1d(a1, b1, n1),
        (1, "fourier") => GridSpec::fourier_1d(a1, b1, n1),
        (2, "fourier") => {
            let a2 = a.require_f64("grid.a2")?;
            let b2 = a.require_f64("grid.b2")?;
            let n2 = a.require_usize("grid.n2")?;
            GridSpec::fourier_2d((a1, a2), (b1, b2), (n1, n2))
        }
        (2, "sine") => {
            return Err(CliError::Config(
                "grid section: the sine basis is 1d only; use grid.basis = fourier".into(),
            ))
        }
        _ => unreachable!("ModelParams capped the dimension"),
    };

    // Flow controls on top of the driver defaults for this grid size.
    let tau = a.require_f64("dgf.tau")?;
    let stop_rule = match a.take("dgf.stop_rule") {
        None => {
            if dimension == 1 {
                StopRule::MaxResidual
            } else {
                StopRule::ActionIncrement
            }
        }
        Some((value, line)) => match value.as_str() {
            "residual" => StopRule::MaxResidual,
            "action" => StopRule::ActionIncrement,
            "both" => StopRule::Both,
            other => {
                return Err(err(
                    line,
                    format!("key `dgf.stop_rule`: expected residual, action or both, got {other:?}"),
                ))
            }
        },
    };
    let mut dgf = DgfConfig::new(tau, stop_rule, grid.n_points());
    if let Some((value, line)) = a.take("dgf.alpha") {
        dgf.alpha_mode = if value == "adaptive" {
            AlphaMode::Adaptive
        } else {
            match value.parse::<f64>().ok().filter(|x| x.is_finite() && *x >= 0.0) {
                Some(x) => AlphaMode::Fixed(x),
                None => {
                    return Err(err(
                        line,
                        format!(
                            "key `dgf.alpha`: expected adaptive or a nonnegative number, got {value:?}"
                        ),
                    ))
                }
            }
        };
    }
    if let Some(tol) = a.take_f64("dgf.residual_tol")? {
        dgf.stop_residual_tol = tol;
    }
    if let Some(tol) = a.take_f64("dgf.action_tol")? {
        dgf.stop_action_tol = tol;
    }
    if let Some(n) = a.take_usize("dgf.max_iters")? {
        dgf.max_iters = n;
    }
    if let Some(n) = a.take_usize("dgf.record_stride")? {
        dgf.record_stride = n;
    }
    if let Some((value, line)) = a.take("dgf.decay_check") {
        dgf.decay_check = parse_decay_check(&value)
            .ok_or_else(|| err(line, format!("key `dgf.decay_check`: expected off, warn or strict, got {value:?}")))?;
    }

    // Initial data. 1d runs default to the half-sine; 2d runs must choose
    // a winding explicitly.
    let initial = match a.take("initial.kind") {
        None => {
            if dimension == 1 {
                InitialKind::Sine1D
            } else {
                return Err(CliError::Config(
                    "missing required key `initial.kind` (2d runs must pick vortex or vortex_mix)"
                        .into(),
                ));
            }
        }
        Some((value, line)) => match value.as_str() {
            "sine" => InitialKind::Sine1D,
            "vortex" => {
                let m = a.require_usize("initial.m")?;
                let m = u32::try_from(m)
                    .map_err(|_| CliError::Config("key `initial.m`: winding too large".into()))?;
                InitialKind::VortexM(m)
            }
            "vortex_mix" => InitialKind::VortexMix,
            other => {
                return Err(err(
                    line,
                    format!(
                        "key `initial.kind`: expected sine, vortex or vortex_mix, got {other:?}"
                    ),
                ))
            }
        },
    };

    let reference = match a.take("reference.kind") {
        None => ReferenceSpec::None,
        Some((value, line)) => match value.as_str() {
            "none" => ReferenceSpec::None,
            "analytic1d" => ReferenceSpec::Analytic1D,
            "file" => {
                let (path, _) = a.take("reference.path").ok_or_else(|| {
                    CliError::Config("missing required key `reference.path`".into())
                })?;
                ReferenceSpec::FieldFile(PathBuf::from(path))
            }
            other => {
                return Err(err(
                    line,
                    format!(
                        "key `reference.kind`: expected none, analytic1d or file, got {other:?}"
                    ),
                ))
            }
        },
    };

    let (directory, _) = a
        .take("output.directory")
        .ok_or_else(|| CliError::Config("missing required key `output.directory`".into()))?;
    let outputs = OutputSpec {
        directory: PathBuf::from(directory),
        emit_records: a.take_bool("output.records")?.unwrap_or(true),
        emit_field: a.take_bool("output.field")?.unwrap_or(true),
        emit_summary: a.take_bool("output.summary")?.unwrap_or(true),
    };

    let seed = a.take_parsed("seed", "an unsigned integer", |v| v.parse::<u64>().ok())?;

    a.finish()?;
    Ok(ExperimentConfig {
        params,
        grid,
        dgf,
        initial,
        reference,
        outputs,
        seed,
    })
}

pub fn parse_decay_check(value: &str) -> Option<DecayCheck> {
    match value {
        "off" => Some(DecayCheck::Off),
        "warn" => Some(DecayCheck::Warn),
        "strict" => Some(DecayCheck::Strict),
        _ => None,
    }
}

/// Loads and parses a config file. Relative paths inside the config
/// (reference field files, the output directory) are resolved against the
/// directory containing the file; a reference path must exist now, not at
/// run time, and an existing non-directory at the output path is rejected.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut config = parse_config(&text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    if let ReferenceSpec::FieldFile(p) = &config.reference {
        let resolved = if p.is_relative() { base.join(p) } else { p.clone() };
        if !resolved.is_file() {
            return Err(CliError::Config(format!(
                "reference field file {} does not exist",
                resolved.display()
            )));
        }
        config.reference = ReferenceSpec::FieldFile(resolved);
    }
    let dir = &config.outputs.directory;
    let resolved = if dir.is_relative() { base.join(dir) } else { dir.clone() };
    if resolved.exists() && !resolved.is_dir() {
        return Err(CliError::Config(format!(
            "output.directory {} exists and is not a directory",
            resolved.display()
        )));
    }
    config.outputs.directory = resolved;
    Ok(config)
}
