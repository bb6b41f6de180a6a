//! Run configuration: TOML file, command-line overrides and validation.
//!
//! Precedence is flags > file > `EIGENBATH_SEED` (seed only) > built-in
//! defaults. Band parameters have no defaults: abstract families need
//! `g`/`g_prime`, spin families need `n_env`/`band_k`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use eigenbath::family::{Family, FamilyParams};
use eigenbath::spinbath::{IntraKind, MAX_PROJECTED_ENV_SPINS};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Largest dense cross-subspace dimension the CLI will diagonalize.
pub const MAX_DENSE_DIM: usize = 8192;

pub const SEED_ENV: &str = "EIGENBATH_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    LambdaDist,
    Evolve,
    Sweep,
    GuePdf,
    Report,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::LambdaDist => "lambda-dist",
            Task::Evolve => "evolve",
            Task::Sweep => "sweep",
            Task::GuePdf => "gue-pdf",
            Task::Report => "report",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        [
            Task::LambdaDist,
            Task::Evolve,
            Task::Sweep,
            Task::GuePdf,
            Task::Report,
        ]
        .into_iter()
        .find(|t| t.name() == s)
        .ok_or_else(|| CliError::config(format!("field `task`: unknown task '{s}'")))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub task: Option<String>,
    pub family: Option<String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub bins: Option<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub matrix_out: Option<PathBuf>,
    #[serde(default)]
    pub band: BandSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub coupling: CouplingSection,
    #[serde(default)]
    pub evolve: EvolveSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub gue_pdf: GuePdfSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSection {
    pub g: Option<usize>,
    pub g_prime: Option<usize>,
    pub n_env: Option<usize>,
    pub band_k: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub delta_eps: Option<f64>,
    pub detuning: Option<f64>,
    pub zeeman_spread: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub scale: Option<f64>,
    pub strength: Option<f64>,
    pub intra_kind: Option<String>,
    pub intra_strength: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub t_max: Option<f64>,
    pub time_samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub scales: Option<Vec<f64>>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuePdfSection {
    pub points: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.message().to_string()))
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long = "g-prime")]
    pub g_prime: Option<usize>,
    #[arg(long = "n-env")]
    pub n_env: Option<usize>,
    #[arg(long = "band-k")]
    pub band_k: Option<usize>,
    /// Ensemble size (matrices, or seeds for spin families).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Base seed; falls back to the config file, then EIGENBATH_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// GUE / interaction-block entry scale.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Bandwidth of the equidistant structured family.
    #[arg(long = "delta-eps")]
    pub delta_eps: Option<f64>,
    #[arg(long)]
    pub detuning: Option<f64>,
    #[arg(long = "zeeman-spread")]
    pub zeeman_spread: Option<f64>,
    /// Half-width of the uniform star coupling entries.
    #[arg(long = "coupling-strength")]
    pub coupling_strength: Option<f64>,
    /// none, xx, xx_plus_yy or heisenberg.
    #[arg(long = "intra-kind")]
    pub intra_kind: Option<String>,
    #[arg(long = "intra-strength")]
    pub intra_strength: Option<f64>,
    /// Histogram bins on [-1, 1].
    #[arg(long)]
    pub bins: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file; the SVG view goes next to it with an .svg extension.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write the first sampled Hamiltonian as CSV (report only).
    #[arg(long = "matrix-out", value_name = "PATH")]
    pub matrix_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    /// `None` only for `gue-pdf`, which needs no family.
    pub family: Option<Family>,
    pub params: FamilyParams,
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub matrix_out: Option<PathBuf>,
    pub t_max: Option<f64>,
    pub time_samples: usize,
    pub scales: Vec<f64>,
    pub pdf_points: usize,
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn parse_field<T: FromStr>(field: &str, value: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::config(format!("field `{field}`: {e}")))
}

fn require<T>(value: Option<T>, field: &str, why: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::config(format!("missing required field `{field}` ({why})")))
}

fn positive(field: &str, x: f64) -> CliResult<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::config(format!("field `{field}` must be positive, got {x}")))
    }
}

fn non_negative(field: &str, x: f64) -> CliResult<f64> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(CliError::config(format!("field `{field}` must be non-negative, got {x}")))
    }
}

impl RunConfig {
    /// Resolves `task` (or the file's `task` when `None`), the file named by
    /// `flags.config`, the flags and `env_seed` into a validated config.
    pub fn resolve(task: Option<Task>, flags: &Overrides, env_seed: Option<&str>) -> CliResult<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(task, flags, file, env_seed)
    }

    pub fn merge(
        task: Option<Task>,
        flags: &Overrides,
        file: FileConfig,
        env_seed: Option<&str>,
    ) -> CliResult<Self> {
        let task = match (task, &file.task) {
            (Some(t), _) => t,
            (None, Some(name)) => name.parse()?,
            (None, None) => return Err(CliError::config("missing required field `task`")),
        };
        let defaults = FamilyParams::default();

        let family_name = pick(flags.family.clone(), file.family);
        let family = match (&family_name, task) {
            (Some(name), _) => Some(parse_field::<Family>("family", name)?),
            (None, Task::GuePdf) => None,
            (None, _) => return Err(CliError::config("missing required field `family`")),
        };

        let g = pick(flags.g, file.band.g);
        let g_prime = pick(flags.g_prime, file.band.g_prime);
        let n_env = pick(flags.n_env, file.band.n_env);
        let band_k = pick(flags.band_k, file.band.band_k);
        let spin = family.is_some_and(|f| f.is_spin());
        let (g, g_prime, n_env, band_k) = if spin {
            let f = family.unwrap();
            let n = require(n_env, "n_env", &format!("family {f}"))?;
            let k = require(band_k, "band_k", &format!("family {f}"))?;
            if n > MAX_PROJECTED_ENV_SPINS {
                return Err(CliError::Resource(format!(
                    "n_env = {n} exceeds the limit of {MAX_PROJECTED_ENV_SPINS} environment spins"
                )));
            }
            if k + 1 > n {
                return Err(CliError::config(format!(
                    "field `band_k` = {k} needs band k+1 to exist for n_env = {n}"
                )));
            }
            (defaults.g, defaults.g_prime, n, k)
        } else {
            let why = match family {
                Some(f) => format!("family {f}"),
                None => format!("task {task}"),
            };
            let g = require(g, "g", &why)?;
            let gp = require(g_prime, "g_prime", &why)?;
            if g == 0 || gp == 0 {
                return Err(CliError::config("fields `g` and `g_prime` must be at least 1"));
            }
            if task != Task::GuePdf && g + gp > MAX_DENSE_DIM {
                return Err(CliError::Resource(format!(
                    "g + g_prime = {} exceeds the dense limit of {MAX_DENSE_DIM}",
                    g + gp
                )));
            }
            (g, gp, defaults.n_env, defaults.band_k)
        };

        let intra_kind = match pick(flags.intra_kind.clone(), file.coupling.intra_kind) {
            Some(name) => parse_field::<IntraKind>("intra_kind", &name)?,
            None => defaults.intra_kind,
        };
        let params = FamilyParams {
            g,
            g_prime,
            n_env,
            band_k,
            scale: positive("scale", pick(flags.scale, file.coupling.scale).unwrap_or(defaults.scale))?,
            delta_eps: non_negative(
                "delta_eps",
                pick(flags.delta_eps, file.spectrum.delta_eps).unwrap_or(defaults.delta_eps),
            )?,
            detuning: pick(flags.detuning, file.spectrum.detuning).unwrap_or(defaults.detuning),
            coupling_strength: positive(
                "coupling.strength",
                pick(flags.coupling_strength, file.coupling.strength)
                    .unwrap_or(defaults.coupling_strength),
            )?,
            intra_kind,
            intra_strength: pick(flags.intra_strength, file.coupling.intra_strength)
                .unwrap_or(defaults.intra_strength),
            zeeman_spread: non_negative(
                "zeeman_spread",
                pick(flags.zeeman_spread, file.spectrum.zeeman_spread)
                    .unwrap_or(defaults.zeeman_spread),
            )?,
        };
        if !params.detuning.is_finite() || !params.intra_strength.is_finite() {
            return Err(CliError::config("fields `detuning` and `intra_strength` must be finite"));
        }

        let samples = pick(flags.samples, file.samples).unwrap_or(1);
        if samples == 0 {
            return Err(CliError::config("field `samples` must be at least 1"));
        }
        let seed = match pick(flags.seed, file.seed) {
            Some(s) => s,
            None => match env_seed {
                Some(text) => text.trim().parse().map_err(|_| {
                    CliError::config(format!("{SEED_ENV} must be an unsigned integer, got '{text}'"))
                })?,
                None => 0,
            },
        };
        let bins = pick(flags.bins, file.bins).unwrap_or(eigenbath::analysis::DEFAULT_BINS);
        if bins == 0 {
            return Err(CliError::config("field `bins` must be at least 1"));
        }

        let t_max = file.evolve.t_max.map(|t| positive("evolve.t_max", t)).transpose()?;
        let time_samples = file
            .evolve
            .time_samples
            .unwrap_or(eigenbath::dynamics::DEFAULT_TIME_SAMPLES);
        if time_samples < 2 {
            return Err(CliError::config("field `evolve.time_samples` must be at least 2"));
        }

        let scales = sweep_scales(&file.sweep)?;
        let pdf_points = file.gue_pdf.points.unwrap_or(401);
        if pdf_points < 2 {
            return Err(CliError::config("field `gue_pdf.points` must be at least 2"));
        }

        Ok(RunConfig {
            task,
            family,
            params,
            samples,
            seed,
            bins,
            jobs: pick(flags.jobs, file.jobs).unwrap_or(0),
            out: pick(flags.out.clone(), file.out),
            matrix_out: pick(flags.matrix_out.clone(), file.matrix_out),
            t_max,
            time_samples,
            scales,
            pdf_points,
        })
    }

    /// The family; only `gue-pdf` runs without one.
    pub fn family(&self) -> Family {
        self.family.unwrap_or(Family::Gue)
    }
}

fn sweep_scales(s: &SweepSection) -> CliResult<Vec<f64>> {
    let scales = match &s.scales {
        Some(list) => {
            if s.s_min.is_some() || s.s_max.is_some() || s.points.is_some() {
                return Err(CliError::config(
                    "field `sweep.scales` cannot be combined with `s_min`/`s_max`/`points`",
                ));
            }
            list.clone()
        }
        None => {
            let lo = s.s_min.unwrap_or(0.0);
            let hi = s.s_max.unwrap_or(4.0);
            let n = s.points.unwrap_or(41);
            if n < 2 || !(hi > lo) {
                return Err(CliError::config(
                    "field `sweep`: need points >= 2 and s_max > s_min",
                ));
            }
            (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
        }
    };
    if scales.is_empty() {
        return Err(CliError::config("field `sweep.scales` must not be empty"));
    }
    for &x in &scales {
        non_negative("sweep.scales", x)?;
    }
    Ok(scales)
}
