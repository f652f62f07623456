//! Flat `key = value` experiment configuration.
//!
//! Lists are comma separated, `#` starts a comment line. Every key can be
//! overridden on the command line with `--set key=value`.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nlradius::embedding::MI_BINS;
use nlradius::recurrence::{DEFAULT_COUNT_FLOOR, DEFAULT_M_RANGE};
use nlradius::stats::DEFAULT_RESAMPLES;
use nlradius::systems::SystemKind;
use nlradius::NormKind;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauSpec {
    /// 1 for maps and first mutual-information minimum otherwise.
    Auto,
    AutoMi,
    Fixed(usize),
}

impl fmt::Display for TauSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauSpec::Auto => f.write_str("auto"),
            TauSpec::AutoMi => f.write_str("auto-mi"),
            TauSpec::Fixed(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for TauSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(TauSpec::Auto),
            "auto-mi" | "mi" => Ok(TauSpec::AutoMi),
            _ => match s.parse::<usize>() {
                Ok(t) if t >= 1 => Ok(TauSpec::Fixed(t)),
                _ => Err(format!(
                    "tau must be a positive integer, 'auto' or 'auto-mi', got '{s}'"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Corrdim,
    K2,
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "corrdim" => Ok(Estimator::Corrdim),
            "k2" => Ok(Estimator::K2),
            _ => Err(format!("estimator must be 'corrdim' or 'k2', got '{s}'")),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Corrdim => "corrdim",
            Estimator::K2 => "k2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: Option<String>,
    pub inputs: Vec<PathBuf>,
    /// Sampling step of input files.
    pub dt: f64,
    pub lengths: Vec<usize>,
    pub noise_levels: Vec<f64>,
    pub seeds: usize,
    pub master_seed: u64,
    pub transient: Option<usize>,
    pub dim: Option<usize>,
    pub tau: TauSpec,
    pub max_tau: Option<usize>,
    pub mi_bins: usize,
    pub norm: NormKind,
    pub betas: Vec<f64>,
    pub grid_points: usize,
    pub grid_lower: f64,
    pub grid_sigmas: f64,
    pub log_r_min: f64,
    pub log_r_max: f64,
    pub k2_radii: usize,
    pub m_lo: usize,
    pub m_hi: usize,
    pub count_floor: u64,
    pub truth: Option<f64>,
    pub resamples: usize,
    pub estimator: Option<Estimator>,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: None,
            inputs: Vec::new(),
            dt: 1.0,
            lengths: Vec::new(),
            noise_levels: vec![0.0],
            seeds: 1,
            master_seed: 0,
            transient: None,
            dim: None,
            tau: TauSpec::Auto,
            max_tau: None,
            mi_bins: MI_BINS,
            norm: NormKind::Linf,
            betas: vec![0.01, 0.1, 0.5],
            grid_points: nlradius::correlation::DEFAULT_GRID_POINTS,
            grid_lower: nlradius::correlation::FULL_RANGE_LOWER,
            grid_sigmas: nlradius::correlation::FULL_RANGE_SIGMAS,
            log_r_min: -4.0,
            log_r_max: 0.5,
            k2_radii: 50,
            m_lo: DEFAULT_M_RANGE.0,
            m_hi: DEFAULT_M_RANGE.1,
            count_floor: DEFAULT_COUNT_FLOOR,
            truth: None,
            resamples: DEFAULT_RESAMPLES,
            estimator: None,
            output: PathBuf::from("out"),
        }
    }
}

fn list<T: FromStr>(v: &str) -> Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| format!("invalid list item '{s}'")))
        .collect()
}

fn one<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse::<T>().map_err(|_| format!("invalid value '{v}'"))
}

fn optional<T: FromStr>(v: &str) -> Result<Option<T>, String> {
    if v.is_empty() || v == "none" {
        Ok(None)
    } else {
        one(v).map(Some)
    }
}

fn csv_list<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn opt<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "none".to_string(), |v| v.to_string())
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key.trim() {
            "system" => self.system = optional(v)?,
            "input" | "inputs" => self.inputs = list(v)?,
            "dt" => self.dt = one(v)?,
            "lengths" => self.lengths = list(v)?,
            "noise_levels" => self.noise_levels = list(v)?,
            "seeds" => self.seeds = one(v)?,
            "seed" => self.master_seed = one(v)?,
            "transient" => self.transient = optional(v)?,
            "dim" => self.dim = optional(v)?,
            "tau" => self.tau = v.parse()?,
            "max_tau" => self.max_tau = optional(v)?,
            "mi_bins" => self.mi_bins = one(v)?,
            "norm" => self.norm = v.parse().map_err(|e: nlradius::Error| e.to_string())?,
            "betas" => self.betas = list(v)?,
            "grid_points" => self.grid_points = one(v)?,
            "grid_lower" => self.grid_lower = one(v)?,
            "grid_sigmas" => self.grid_sigmas = one(v)?,
            "log_r_min" => self.log_r_min = one(v)?,
            "log_r_max" => self.log_r_max = one(v)?,
            "k2_radii" => self.k2_radii = one(v)?,
            "m_lo" => self.m_lo = one(v)?,
            "m_hi" => self.m_hi = one(v)?,
            "count_floor" => self.count_floor = one(v)?,
            "truth" => self.truth = optional(v)?,
            "resamples" => self.resamples = one(v)?,
            "estimator" => self.estimator = if v.is_empty() { None } else { Some(v.parse()?) },
            "output" => self.output = PathBuf::from(v),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Applies `key = value` lines.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> CliResult<()> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |msg: String| CliError::Parse {
                path: origin.to_path_buf(),
                line: k + 1,
                msg,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected 'key = value', found '{line}'")))?;
            self.set(key, value).map_err(parse_err)?;
        }
        Ok(())
    }

    /// Defaults, then the file (if any), then `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let mut cfg = Self::default();
        if let Some(p) = path {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            cfg.apply_text(&text, p)?;
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| CliError::Argument(format!("override must be key=value, got '{o}'")))?;
            cfg.set(k, v)
                .map_err(|e| CliError::Argument(format!("--set {o}: {e}")))?;
        }
        Ok(cfg)
    }

    pub fn system_kind(&self) -> CliResult<Option<SystemKind>> {
        self.system
            .as_deref()
            .map(SystemKind::by_name)
            .transpose()
            .map_err(CliError::from)
    }

    /// Checks the invariants shared by all experiment commands.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: &str| Err(CliError::Argument(m.to_string()));
        match (self.system.is_some(), self.inputs.is_empty()) {
            (true, false) => return bad("set either 'system' or 'input', not both"),
            (false, true) => return bad("one of 'system' or 'input' is required"),
            _ => {}
        }
        self.system_kind()?;
        for p in &self.inputs {
            if !p.is_file() {
                return Err(CliError::Argument(format!("input file {} does not exist", p.display())));
            }
        }
        if self.system.is_some() && self.lengths.is_empty() {
            return bad("'lengths' must be a nonempty list");
        }
        if self.lengths.iter().any(|&n| n < 2) {
            return bad("every length must be at least 2");
        }
        if self.noise_levels.is_empty() || self.noise_levels.iter().any(|&k| !(k >= 0.0) || !k.is_finite()) {
            return bad("'noise_levels' must be a nonempty list of nonnegative numbers");
        }
        if self.seeds < 1 {
            return bad("'seeds' must be at least 1");
        }
        if self.betas.is_empty() || self.betas.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
            return bad("'betas' must be a nonempty list of values in (0, 1)");
        }
        if self.dim == Some(0) {
            return bad("'dim' must be positive");
        }
        if !(self.dt > 0.0) {
            return bad("'dt' must be positive");
        }
        if self.grid_points < 2 || self.k2_radii < 2 {
            return bad("radius grids need at least 2 points");
        }
        if !(self.grid_lower > 0.0 && self.grid_sigmas > 0.0) {
            return bad("full-range grid bounds must be positive");
        }
        if !(self.log_r_min < self.log_r_max) {
            return bad("'log_r_min' must be below 'log_r_max'");
        }
        if !(self.m_hi > self.m_lo && self.m_lo >= 1) {
            return bad("need m_hi > m_lo >= 1");
        }
        if self.resamples < 100 {
            return bad("'resamples' must be at least 100");
        }
        Ok(())
    }

    /// The resolved configuration in the file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let inputs: Vec<String> = self.inputs.iter().map(|p| p.display().to_string()).collect();
        let pairs: Vec<(&str, String)> = vec![
            ("system", opt(&self.system)),
            ("input", inputs.join(",")),
            ("dt", self.dt.to_string()),
            ("lengths", csv_list(&self.lengths)),
            ("noise_levels", csv_list(&self.noise_levels)),
            ("seeds", self.seeds.to_string()),
            ("seed", self.master_seed.to_string()),
            ("transient", opt(&self.transient)),
            ("dim", opt(&self.dim)),
            ("tau", self.tau.to_string()),
            ("max_tau", opt(&self.max_tau)),
            ("mi_bins", self.mi_bins.to_string()),
            ("norm", self.norm.to_string()),
            ("betas", csv_list(&self.betas)),
            ("grid_points", self.grid_points.to_string()),
            ("grid_lower", self.grid_lower.to_string()),
            ("grid_sigmas", self.grid_sigmas.to_string()),
            ("log_r_min", self.log_r_min.to_string()),
            ("log_r_max", self.log_r_max.to_string()),
            ("k2_radii", self.k2_radii.to_string()),
            ("m_lo", self.m_lo.to_string()),
            ("m_hi", self.m_hi.to_string()),
            ("count_floor", self.count_floor.to_string()),
            ("truth", opt(&self.truth)),
            ("resamples", self.resamples.to_string()),
            ("estimator", self.estimator.map(|e| e.to_string()).unwrap_or_default()),
            ("output", self.output.display().to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
