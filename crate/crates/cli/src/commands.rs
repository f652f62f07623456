//! Single-file commands: simulate, radius, embed-delay, ingest, rqa-export.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use nlradius::embedding::{default_max_tau, select_delay_mi};
use nlradius::radius::spread_components;
use nlradius::recurrence::diagonal_histogram;
use nlradius::{delay_embed, recurrence_matrix, EmbeddingSpec, NormKind, RadiusSelection, Series};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::io::{create, csv_writer, ensure_dir, json_line, read_series, write_series};
use crate::manifest::{FileEntry, Manifest};
use crate::runs::Plan;

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SeriesFormat {
    /// One `x` sample per line.
    Series,
    /// `t,x[,y,z]` with a header.
    Csv,
}

/// Writes one file per run of the configuration and returns their paths.
pub fn simulate(cfg: &ExperimentConfig, format: SeriesFormat) -> CliResult<Vec<PathBuf>> {
    cfg.validate()?;
    if cfg.system.is_none() {
        return Err(CliError::Argument("simulate needs 'system'".into()));
    }
    let plan = Plan::new(cfg)?;
    let kind = cfg.system_kind()?.expect("checked above");
    ensure_dir(&cfg.output)?;
    let mut paths = Vec::new();
    let mut manifest = Manifest::new("simulate", cfg);
    for run in &plan.runs {
        let mut name = format!("{}_N{}", kind.name(), run.n);
        if run.k > 0.0 {
            name.push_str(&format!("_k{}", run.k));
        }
        name.push_str(&format!("_s{}", run.seed_index));
        let path = match format {
            SeriesFormat::Series => {
                let path = cfg.output.join(format!("{name}.txt"));
                write_series(&path, plan.series(cfg, run)?.values())?;
                path
            }
            SeriesFormat::Csv => {
                let path = cfg.output.join(format!("{name}.csv"));
                write_state_csv(cfg, &plan, run, &path)?;
                path
            }
        };
        manifest = manifest.file(FileEntry::new(
            path.file_name().unwrap().to_string_lossy(),
            "generated series after transient removal",
            if format == SeriesFormat::Csv {
                "t"
            } else {
                "sample index"
            },
            "x",
        ));
        paths.push(path);
    }
    manifest.write(&cfg.output)?;
    Ok(paths)
}

fn write_state_csv(cfg: &ExperimentConfig, plan: &Plan, run: &crate::runs::RunKey, path: &Path) -> CliResult<()> {
    let kind = cfg.system_kind()?.expect("system configured");
    let mut spec = nlradius::systems::SystemSpec::new(kind, run.n, run.seed);
    if let Some(t) = cfg.transient {
        spec.transient = t;
    }
    let generated = nlradius::systems::generate(&spec)?;
    let xs = plan.series(cfg, run)?;
    let mut w = csv_writer(path)?;
    let names = ["x", "y", "z"];
    let mut header = vec!["t"];
    header.extend(&names[..kind.state_dim()]);
    w.write_record(&header)?;
    for ((t, state), x) in generated.times().zip(&generated.states).zip(xs.values()) {
        let mut rec = vec![t.to_string(), x.to_string()];
        rec.extend(state[1..].iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn load(path: &Path, dt: f64) -> CliResult<Series> {
    let values = read_series(path)?;
    if values.len() < 2 {
        return Err(nlradius::Error::SeriesTooShort {
            required: 2,
            actual: values.len(),
        }
        .into());
    }
    Ok(Series::new(values, dt)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusReport {
    pub r_opt: f64,
    pub alpha: f64,
    pub spread: f64,
    pub sigma: f64,
    pub iqr: f64,
    /// Trajectory length `N - (d - 1) tau`.
    pub n: usize,
    #[serde(rename = "N")]
    pub len: usize,
    pub d: usize,
    pub tau: usize,
    pub norm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

/// Reference radius of a delay-embedded series.
pub fn radius_report(
    series: &Series,
    d: usize,
    tau: usize,
    norm: NormKind,
    beta: Option<f64>,
) -> CliResult<RadiusReport> {
    let traj = delay_embed(series, EmbeddingSpec::new(d, tau), norm)?;
    let parts = spread_components(&traj)?;
    let sel = RadiusSelection::for_trajectory(&traj)?;
    let range = beta.map(|b| sel.range(b)).transpose()?;
    Ok(RadiusReport {
        r_opt: sel.r_opt,
        alpha: sel.alpha,
        spread: sel.spread,
        sigma: parts.sigma,
        iqr: parts.iqr,
        n: sel.n,
        len: series.len(),
        d,
        tau,
        norm: norm.to_string(),
        beta,
        lower: range.map(|r| r.lower),
        upper: range.map(|r| r.upper),
    })
}

pub fn radius(
    path: &Path,
    d: usize,
    tau: usize,
    norm: NormKind,
    beta: Option<f64>,
    out: &mut dyn Write,
) -> CliResult<()> {
    let series = load(path, 1.0)?;
    let report = radius_report(&series, d, tau, norm, beta)?;
    writeln!(out, "{}", json_line(&report)).map_err(stdout_err)
}

#[derive(Debug, Clone, Serialize)]
pub struct DelayReport {
    pub tau: usize,
    pub interior_minimum: bool,
    pub max_tau: usize,
    pub bins: usize,
}

pub fn embed_delay(
    path: &Path,
    max_tau: Option<usize>,
    bins: usize,
    curve: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult<()> {
    let series = load(path, 1.0)?;
    let max_tau = max_tau.unwrap_or_else(|| default_max_tau(series.len()));
    let sel = select_delay_mi(&series, max_tau, bins)?;
    if let Some(p) = curve {
        let mut w = csv_writer(p)?;
        w.write_record(["tau", "mi"])?;
        for (k, v) in sel.curve.iter().enumerate() {
            w.write_record([(k + 1).to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| CliError::io(p, e))?;
    }
    let report = DelayReport {
        tau: sel.tau,
        interior_minimum: sel.interior_minimum,
        max_tau,
        bins,
    };
    writeln!(out, "{}", json_line(&report)).map_err(stdout_err)
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentReport {
    pub segment: usize,
    pub start: usize,
    pub dt: f64,
    #[serde(flatten)]
    pub radius: RadiusReport,
}

pub struct IngestOptions {
    pub dt: f64,
    pub segment: Option<usize>,
    pub d: usize,
    pub tau: usize,
    pub norm: NormKind,
}

/// Validates a series file and summarizes it (or each of its segments).
pub fn ingest(path: &Path, opts: &IngestOptions) -> CliResult<Vec<SegmentReport>> {
    let series = load(path, opts.dt)?;
    let len = opts.segment.unwrap_or(series.len());
    if len < 2 || len > series.len() {
        return Err(CliError::Argument(format!(
            "segment length {len} does not fit a series of {} samples",
            series.len()
        )));
    }
    (0..series.len() / len)
        .map(|k| {
            let seg = series.segment(k * len, len)?;
            Ok(SegmentReport {
                segment: k,
                start: k * len,
                dt: opts.dt,
                radius: radius_report(&seg, opts.d, opts.tau, opts.norm, None)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RpFormat {
    Pbm,
    Csv,
}

pub struct RqaOptions {
    pub d: usize,
    pub tau: usize,
    pub norm: NormKind,
    pub radius: Option<f64>,
    pub format: RpFormat,
    pub output: Option<PathBuf>,
    pub histogram: Option<PathBuf>,
    pub m_max: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RqaReport {
    pub n: usize,
    pub epsilon: f64,
    pub recurrence_rate: f64,
    pub recurrent_points: u64,
}

/// Recurrence plot of the embedded series, as PBM or `i,j` CSV.
pub fn rqa_export(path: &Path, opts: &RqaOptions, out: &mut dyn Write) -> CliResult<()> {
    if opts.histogram.is_some() && opts.d != 1 {
        return Err(CliError::Argument(
            "diagonal-line histograms are defined on the scalar series (dim 1)".into(),
        ));
    }
    let series = load(path, 1.0)?;
    let traj = delay_embed(&series, EmbeddingSpec::new(opts.d, opts.tau), opts.norm)?;
    let epsilon = match opts.radius {
        Some(r) => r,
        None => RadiusSelection::for_trajectory(&traj)?.r_opt,
    };
    let rp = recurrence_matrix(&traj, epsilon)?;
    let write = |w: &mut dyn Write| match opts.format {
        RpFormat::Pbm => rp.write_pbm(w),
        RpFormat::Csv => rp.write_csv(w),
    };
    match &opts.output {
        Some(p) => {
            let mut f = create(p)?;
            write(&mut f).and_then(|_| f.flush()).map_err(|e| CliError::io(p, e))?;
            let report = RqaReport {
                n: rp.len(),
                epsilon,
                recurrence_rate: rp.rate(),
                recurrent_points: rp.recurrent_points(),
            };
            writeln!(out, "{}", json_line(&report)).map_err(stdout_err)?;
        }
        None => write(out).map_err(stdout_err)?,
    }
    if let Some(p) = &opts.histogram {
        let hist = diagonal_histogram(&series, epsilon, opts.m_max.min(series.len()))?;
        let mut f = create(p)?;
        hist.write_csv(&mut f)
            .and_then(|_| f.flush())
            .map_err(|e| CliError::io(p, e))?;
    }
    Ok(())
}
