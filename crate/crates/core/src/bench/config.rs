//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dense::{RngSeed, DEFAULT_SIZE_CAP};
use crate::error::{Error, Result};
use crate::problems::{IllPosed, NoiseSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Perturb,
    Rtls,
    Rttls,
    Arttls,
    Prony,
}

impl Experiment {
    pub fn tag(self) -> &'static str {
        match self {
            Experiment::Perturb => "perturb",
            Experiment::Rtls => "rtls",
            Experiment::Rttls => "rttls",
            Experiment::Arttls => "arttls",
            Experiment::Prony => "prony",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "perturb" => Experiment::Perturb,
            "rtls" => Experiment::Rtls,
            "rttls" => Experiment::Rttls,
            "arttls" => Experiment::Arttls,
            "prony" => Experiment::Prony,
            other => return Err(Error::InvalidArgument(format!("unknown experiment `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown output format `{other}`"))),
        }
    }
}

/// Everything needed to rerun an experiment. Every field has a default, so an
/// empty file is a valid configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// `example1`, `example2`, `prony` or an ill-posed problem name
    pub problem: String,
    pub m: usize,
    /// column count; problem-specific default when `None`
    pub n: Option<usize>,
    /// `ε_p` of the first synthetic example
    pub eps_p: f64,
    /// relative noise levels; one group of rows per level
    pub noise_levels: Vec<f64>,
    pub noise_seed: RngSeed,
    /// sketch width `l`
    pub samples_l: usize,
    /// truncation index; chosen by GCV when `None`
    pub trunc_k: Option<usize>,
    /// adaptive tolerance; per-problem default when `None`
    pub tolerance_eps: Option<f64>,
    pub num_probes: usize,
    /// Frobenius norm of the perturbation in the perturb experiment
    pub scale: f64,
    pub seed: RngSeed,
    pub repetitions: usize,
    pub size_cap: usize,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Perturb,
            problem: "example1".into(),
            m: 100,
            n: None,
            eps_p: 0.999976032,
            noise_levels: vec![1e-3],
            noise_seed: RngSeed(17),
            samples_l: 10,
            trunc_k: None,
            tolerance_eps: None,
            num_probes: 7,
            scale: 1e-10,
            seed: RngSeed(1),
            repetitions: 1,
            size_cap: DEFAULT_SIZE_CAP,
            output_path: None,
            output_format: OutputFormat::Csv,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse { line, msg: format!("bad value `{value}` for `{key}`") })
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment. Unknown keys are
    /// errors so typos do not silently fall back to defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(Error::Parse { line: idx + 1, msg: format!("expected `key = value`, got `{line}`") })?;
            cfg.set(key.trim(), value.trim(), idx + 1)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key as if it appeared on `line` of a config file.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        match key {
            "experiment" => self.experiment = value.parse().map_err(|e: Error| Error::Parse { line, msg: e.to_string() })?,
            "problem" => self.problem = value.to_string(),
            "m" => self.m = parse_num(key, value, line)?,
            "n" => self.n = Some(parse_num(key, value, line)?),
            "eps_p" => self.eps_p = parse_num(key, value, line)?,
            "noise" => {
                self.noise_levels =
                    value.split(',').map(|v| parse_num(key, v.trim(), line)).collect::<Result<_>>()?
            }
            "noise_seed" => self.noise_seed = RngSeed(parse_num(key, value, line)?),
            "l" => self.samples_l = parse_num(key, value, line)?,
            "k" => self.trunc_k = Some(parse_num(key, value, line)?),
            "eps" => self.tolerance_eps = Some(parse_num(key, value, line)?),
            "probes" => self.num_probes = parse_num(key, value, line)?,
            "scale" => self.scale = parse_num(key, value, line)?,
            "seed" => self.seed = RngSeed(parse_num(key, value, line)?),
            "repetitions" => self.repetitions = parse_num(key, value, line)?,
            "size_cap" => self.size_cap = parse_num(key, value, line)?,
            "output" => self.output_path = Some(PathBuf::from(value)),
            "format" => self.output_format = value.parse().map_err(|e: Error| Error::Parse { line, msg: e.to_string() })?,
            other => return Err(Error::Parse { line, msg: format!("unknown key `{other}`") }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
        }
        match self.problem.as_str() {
            "example1" | "example2" | "prony" => {}
            name => {
                name.parse::<IllPosed>()?;
            }
        }
        if self.noise_levels.iter().any(|&d| !(d >= 0.0)) {
            return Err(Error::InvalidArgument("noise levels must be nonnegative".into()));
        }
        Ok(())
    }

    pub(crate) fn noise(&self, level: f64) -> NoiseSpec {
        NoiseSpec { level, seed: self.noise_seed }
    }
}
