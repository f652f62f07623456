//! Command-line front end and experiment harness for `nlradius`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod compare;
pub mod config;
pub mod corrdim;
pub mod error;
pub mod io;
pub mod k2;
pub mod manifest;
pub mod runs;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use nlradius::{K2Settings, NormKind, Series};

use crate::commands::{IngestOptions, RpFormat, RqaOptions, SeriesFormat};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "nlradius",
    version,
    about = "Reference-rule radii for correlation sums, recurrence plots and K2"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Configuration shared by the experiment commands.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory (same as `--set output=DIR`).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl ConfigArgs {
    pub fn load(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(self.config.as_deref(), &self.overrides)?;
        if let Some(o) = &self.output {
            cfg.output = o.clone();
        }
        Ok(cfg)
    }
}

fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse().map_err(|e: nlradius::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate Lorenz, Rossler or Henon series.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum, default_value = "series")]
        format: SeriesFormat,
    },
    /// Reference radius of a series file, as JSON.
    Radius {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        tau: usize,
        #[arg(long, default_value = "linf", value_parser = parse_norm)]
        norm: NormKind,
        /// Also report the range `[beta r_opt, r_opt]`.
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Delay from the first minimum of the delayed mutual information.
    EmbedDelay {
        input: PathBuf,
        #[arg(long)]
        max_tau: Option<usize>,
        #[arg(long, default_value_t = nlradius::embedding::MI_BINS)]
        bins: usize,
        /// Write the `tau,mi` curve to this CSV file.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Correlation-dimension study (full range against beta ranges).
    Corrdim {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// K2 entropy study over a log-radius grid.
    K2 {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Recurrence plot as PBM (P1) or `i,j` CSV.
    RqaExport {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        tau: usize,
        #[arg(long, default_value = "linf", value_parser = parse_norm)]
        norm: NormKind,
        /// Threshold; the reference radius when omitted.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_enum, default_value = "pbm")]
        format: RpFormat,
        /// Destination file (stdout when omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also write the diagonal-line histogram `m,count` to this file.
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        m_max: usize,
    },
    /// Validate a series file and summarize it, optionally per segment.
    Ingest {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
        /// Split into consecutive segments of this many samples.
        #[arg(long)]
        segment: Option<usize>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        tau: usize,
        #[arg(long, default_value = "linf", value_parser = parse_norm)]
        norm: NormKind,
    },
    /// Z-test of K2 between two groups of series under six radius rules.
    CompareRules {
        #[arg(long, num_args = 1.., required = true)]
        group_a: Vec<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        group_b: Vec<PathBuf>,
        #[arg(long)]
        segment: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
        /// Destination CSV (stdout when omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn read_group(paths: &[PathBuf], dt: f64) -> CliResult<Vec<Series>> {
    paths
        .iter()
        .map(|p| Ok(Series::new(io::read_series(p)?, dt)?))
        .collect()
}

/// Executes a parsed command; JSON and stdout-bound tables go to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let stdout_err = |e| CliError::io("<stdout>", e);
    match cli.command {
        Command::Simulate { config, format } => {
            let cfg = config.load()?;
            for p in commands::simulate(&cfg, format)? {
                writeln!(out, "{}", p.display()).map_err(stdout_err)?;
            }
        }
        Command::Radius {
            input,
            dim,
            tau,
            norm,
            beta,
        } => commands::radius(&input, dim, tau, norm, beta, out)?,
        Command::EmbedDelay {
            input,
            max_tau,
            bins,
            curve,
        } => commands::embed_delay(&input, max_tau, bins, curve.as_deref(), out)?,
        Command::Corrdim { config } => {
            let cfg = config.load()?;
            let res = corrdim::run_corrdim(&cfg)?;
            corrdim::write_corrdim(&cfg, &res, &cfg.output)?;
        }
        Command::K2 { config } => {
            let cfg = config.load()?;
            let res = k2::run_k2(&cfg)?;
            k2::write_k2(&cfg, &res, &cfg.output)?;
        }
        Command::RqaExport {
            input,
            dim,
            tau,
            norm,
            radius,
            format,
            output,
            histogram,
            m_max,
        } => {
            let opts = RqaOptions {
                d: dim,
                tau,
                norm,
                radius,
                format,
                output,
                histogram,
                m_max,
            };
            commands::rqa_export(&input, &opts, out)?
        }
        Command::Ingest {
            input,
            dt,
            segment,
            dim,
            tau,
            norm,
        } => {
            let opts = IngestOptions {
                dt,
                segment,
                d: dim,
                tau,
                norm,
            };
            for report in commands::ingest(&input, &opts)? {
                writeln!(out, "{}", io::json_line(&report)).map_err(stdout_err)?;
            }
        }
        Command::CompareRules {
            group_a,
            group_b,
            segment,
            dt,
            output,
        } => {
            let a = compare::segments(&read_group(&group_a, dt)?, segment)?;
            let b = compare::segments(&read_group(&group_b, dt)?, segment)?;
            let rows = compare::compare_rules(&a, &b, &K2Settings::default());
            match output {
                Some(p) => io::write_rows(&p, &rows)?,
                None => {
                    let mut w = csv::Writer::from_writer(&mut *out);
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    w.flush().map_err(stdout_err)?;
                }
            }
        }
    }
    Ok(())
}
