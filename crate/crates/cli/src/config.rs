//! Command-line flags, the optional JSON config file, and their merge into an
//! [`ExperimentConfig`]. Flags take precedence over the file, the file over
//! the defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::output::Format;

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRUNC: usize = 40;
pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_COUNT: usize = 50;
pub const DEFAULT_NU: f64 = 0.3;

#[derive(Debug, Parser)]
#[command(name = "entgap", version, about = "Furstenberg entropy experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    /// Closed-form entropy of a 2^ℕ_fin measure on (2^ℕ, ω_p)
    EntropyExact,
    /// Entropy of the Bernoulli and odometer-skew systems as p decreases to 1/2
    Sweep,
    /// Randomized check of the cocycle identity
    CocycleCheck,
    /// Monte Carlo μ-entropy of a named system
    McEntropy,
    /// Markov-operator norm bound on the entropy of μ̄
    Spectral,
    /// Per-element Jensen bound
    Jensen,
    /// Spectral gap of ℤ acting on ℤ/n
    QuotientCurve,
    /// Singularity test of ω_ν against ω_p
    Separation,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// JSON file with default values for any of these flags
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Measure file
    #[arg(long, global = true)]
    pub mu: Option<PathBuf>,
    /// Integer measure file for the odometer skew column of `sweep`
    #[arg(long, global = true)]
    pub skew_mu: Option<PathBuf>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Output path; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// bernoulli | odometer-skew | swap | random | rotation, per command
    #[arg(long, global = true)]
    pub system: Option<String>,
    /// carry | trivial | residue
    #[arg(long, global = true)]
    pub cocycle: Option<String>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Number of random finite systems
    #[arg(long, global = true)]
    pub count: Option<usize>,
    /// Bernoulli parameter of the simulated law in `separation`
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub indices: Option<Vec<u32>>,
    /// Use the geometric average μ̄ in `mc-entropy`
    #[arg(long, global = true)]
    #[serde(default)]
    pub bar: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub mu: Option<PathBuf>,
    pub skew_mu: Option<PathBuf>,
    pub p: Option<f64>,
    pub p_grid: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
    pub trunc: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    pub alpha: f64,
    pub system: Option<String>,
    pub cocycle: Option<String>,
    pub trials: usize,
    pub n_list: Option<Vec<usize>>,
    pub count: usize,
    pub nu: f64,
    pub indices: Option<Vec<u32>>,
    pub bar: bool,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> Self {
        ExperimentConfig {
            command,
            mu: None,
            skew_mu: None,
            p: None,
            p_grid: None,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            trunc: DEFAULT_TRUNC,
            out: None,
            format: Format::Csv,
            threads: None,
            alpha: DEFAULT_ALPHA,
            system: None,
            cocycle: None,
            trials: DEFAULT_TRIALS,
            n_list: None,
            count: DEFAULT_COUNT,
            nu: DEFAULT_NU,
            indices: None,
            bar: false,
        }
    }

    /// Merges `flags` over the config file they name (if any) over defaults.
    pub fn resolve(command: CommandKind, flags: Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => read_config_file(path)?,
            None => Flags::default(),
        };
        let mut c = ExperimentConfig::new(command);
        macro_rules! pick {
            ($field:ident) => {
                flags.$field.clone().or(file.$field.clone())
            };
        }
        c.mu = pick!(mu);
        c.skew_mu = pick!(skew_mu);
        c.p = pick!(p);
        c.p_grid = pick!(p_grid);
        c.samples = pick!(samples).unwrap_or(c.samples);
        c.seed = pick!(seed).unwrap_or(c.seed);
        c.trunc = pick!(trunc).unwrap_or(c.trunc);
        c.out = pick!(out);
        c.format = pick!(format).unwrap_or(c.format);
        c.threads = pick!(threads);
        c.alpha = pick!(alpha).unwrap_or(c.alpha);
        c.system = pick!(system);
        c.cocycle = pick!(cocycle);
        c.trials = pick!(trials).unwrap_or(c.trials);
        c.n_list = pick!(n_list);
        c.count = pick!(count).unwrap_or(c.count);
        c.nu = pick!(nu).unwrap_or(c.nu);
        c.indices = pick!(indices);
        c.bar = flags.bar || file.bar;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(CliError::Config("--samples must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Config(format!("--alpha {} outside (0, 1)", self.alpha)));
        }
        if self.trials == 0 {
            return Err(CliError::Config("--trials must be at least 1".into()));
        }
        Ok(())
    }

    /// `--p-grid` if given, else `--p`.
    pub fn p_values(&self) -> Result<Vec<f64>> {
        let values = match (&self.p_grid, self.p) {
            (Some(grid), _) => grid.clone(),
            (None, Some(p)) => vec![p],
            (None, None) => return Err(CliError::Config("--p or --p-grid is required".into())),
        };
        if values.is_empty() {
            return Err(CliError::Config("empty --p-grid".into()));
        }
        if let Some(p) = values.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(CliError::Config(format!("p = {p} outside (0, 1)")));
        }
        Ok(values)
    }
}

fn read_config_file(path: &Path) -> Result<Flags> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))
}
