//! Enumeration and loading of the (source, length, noise, seed) runs of an
//! experiment.

use std::path::Path;

use nlradius::embedding::{default_max_tau, select_delay_mi};
use nlradius::rng::derive_seed_path;
use nlradius::systems::{add_observational_noise, generate, SystemKind, SystemSpec};
use nlradius::{delay_embed, EmbeddingSpec, NormKind, Series, Traj};

use crate::config::{ExperimentConfig, TauSpec};
use crate::error::CliResult;
use crate::io::read_series;

/// Where a run's data comes from.
#[derive(Debug, Clone)]
pub enum Source {
    System(SystemKind),
    File { label: String, series: Series },
}

impl Source {
    pub fn label(&self) -> &str {
        match self {
            Source::System(k) => k.name(),
            Source::File { label, .. } => label,
        }
    }

    fn is_map(&self) -> bool {
        matches!(self, Source::System(k) if k.is_map())
    }

    fn default_dim(&self) -> usize {
        match self {
            Source::System(k) => k.state_dim(),
            Source::File { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunKey {
    pub source: usize,
    pub n: usize,
    pub k: f64,
    pub noise_index: usize,
    pub seed_index: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub sources: Vec<Source>,
    pub runs: Vec<RunKey>,
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

impl Plan {
    /// Every run of the configuration, ordered by source, length, noise
    /// level and seed index.
    ///
    /// Run seeds are `derive_seed_path(master, [length, noise_index,
    /// seed_index])` for systems and `[file_index, noise_index, seed_index]`
    /// for input files. Noise-free input files get a single run.
    pub fn new(cfg: &ExperimentConfig) -> CliResult<Self> {
        let mut sources = Vec::new();
        let mut runs = Vec::new();
        if let Some(kind) = cfg.system_kind()? {
            sources.push(Source::System(kind));
            for &n in &cfg.lengths {
                for (ki, &k) in cfg.noise_levels.iter().enumerate() {
                    for s in 0..cfg.seeds {
                        runs.push(RunKey {
                            source: 0,
                            n,
                            k,
                            noise_index: ki,
                            seed_index: s,
                            seed: derive_seed_path(cfg.master_seed, &[n as u64, ki as u64, s as u64]),
                        });
                    }
                }
            }
        } else {
            for (fi, path) in cfg.inputs.iter().enumerate() {
                let series = Series::new(read_series(path)?, cfg.dt)?;
                let n = series.len();
                sources.push(Source::File {
                    label: file_label(path),
                    series,
                });
                for (ki, &k) in cfg.noise_levels.iter().enumerate() {
                    let copies = if k > 0.0 { cfg.seeds } else { 1 };
                    for s in 0..copies {
                        runs.push(RunKey {
                            source: fi,
                            n,
                            k,
                            noise_index: ki,
                            seed_index: s,
                            seed: derive_seed_path(cfg.master_seed, &[fi as u64, ki as u64, s as u64]),
                        });
                    }
                }
            }
        }
        Ok(Self { sources, runs })
    }

    pub fn source(&self, run: &RunKey) -> &Source {
        &self.sources[run.source]
    }

    /// The (possibly noise-corrupted) series of a run.
    pub fn series(&self, cfg: &ExperimentConfig, run: &RunKey) -> CliResult<Series> {
        let clean = match self.source(run) {
            Source::System(kind) => {
                let mut spec = SystemSpec::new(*kind, run.n, run.seed);
                if let Some(t) = cfg.transient {
                    spec.transient = t;
                }
                generate(&spec)?.series
            }
            Source::File { series, .. } => series.clone(),
        };
        if run.k > 0.0 {
            Ok(add_observational_noise(&clean, run.k, run.seed)?)
        } else {
            Ok(clean)
        }
    }

    /// Delay and trajectory for a run's series.
    pub fn embed(&self, cfg: &ExperimentConfig, run: &RunKey, series: &Series) -> CliResult<(usize, Traj)> {
        let source = self.source(run);
        let dim = cfg.dim.unwrap_or_else(|| source.default_dim());
        let tau = resolve_tau(cfg.tau, source.is_map(), series, cfg.max_tau, cfg.mi_bins)?;
        Ok((tau, delay_embed(series, EmbeddingSpec::new(dim, tau), cfg.norm)?))
    }
}

pub fn resolve_tau(
    spec: TauSpec,
    is_map: bool,
    series: &Series,
    max_tau: Option<usize>,
    bins: usize,
) -> CliResult<usize> {
    match spec {
        TauSpec::Fixed(t) => Ok(t),
        TauSpec::Auto if is_map => Ok(1),
        TauSpec::Auto | TauSpec::AutoMi => {
            let max = max_tau.unwrap_or_else(|| default_max_tau(series.len()));
            Ok(select_delay_mi(series, max, bins)?.tau)
        }
    }
}

/// Scalar series viewed as one-dimensional points under the max norm.
pub fn scalar_trajectory(series: &Series) -> Traj {
    Traj::from_series(series, NormKind::Linf)
}
