//! Correlation-dimension experiment: full-range and beta-range
//! Grassberger-Procaccia fits for every run.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use nlradius::correlation::{correlation_curve_with, SelfPairs};
use nlradius::stats::sample_std;
use nlradius::{geometric_grid, gp_dimension, Curve, RadiusSelection};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::io::{ensure_dir, write_rows};
use crate::manifest::{FileEntry, Manifest};
use crate::runs::{Plan, RunKey};

pub const FULL: &str = "full";
pub const RANGE: &str = "range";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub system: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: f64,
    pub seed: usize,
    pub method: &'static str,
    pub beta: Option<f64>,
    pub d2: Option<f64>,
    pub tau: Option<usize>,
    pub r_opt: Option<f64>,
    pub points_used: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub system: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: f64,
    pub seed: usize,
    pub method: &'static str,
    pub beta: Option<f64>,
    pub r: f64,
    pub log_r: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "log_C")]
    pub log_c: f64,
    pub in_fit_range: bool,
}

#[derive(Debug, Clone, Default)]
pub struct CorrdimOutput {
    pub estimates: Vec<EstimateRow>,
    pub curves: Vec<CurveRow>,
}

struct Fit {
    beta: Option<f64>,
    curve: Result<(Curve, Option<nlradius::Range>), CliError>,
}

fn fits_for_run(plan: &Plan, cfg: &ExperimentConfig, run: &RunKey) -> CliResult<(usize, f64, Vec<Fit>)> {
    let series = plan.series(cfg, run)?;
    let (tau, traj) = plan.embed(cfg, run, &series)?;
    let sel = RadiusSelection::for_trajectory(&traj)?;
    let mut fits = Vec::with_capacity(cfg.betas.len() + 1);

    let full: CliResult<_> = (|| {
        let upper = cfg.grid_sigmas * sample_std(series.values());
        let grid = geometric_grid(cfg.grid_lower, upper, cfg.grid_points)?;
        Ok((correlation_curve_with(&traj, &grid, SelfPairs::Exclude)?, None))
    })();
    fits.push(Fit {
        beta: None,
        curve: full,
    });
    for &beta in &cfg.betas {
        let curve: CliResult<_> = (|| {
            let range = sel.range(beta)?;
            let grid = geometric_grid(range.lower, range.upper, cfg.grid_points)?;
            Ok((correlation_curve_with(&traj, &grid, SelfPairs::Exclude)?, Some(range)))
        })();
        fits.push(Fit {
            beta: Some(beta),
            curve,
        });
    }
    Ok((tau, sel.r_opt, fits))
}

fn rows_for_run(plan: &Plan, cfg: &ExperimentConfig, run: &RunKey) -> CorrdimOutput {
    let system = plan.source(run).label().to_string();
    let row = |method, beta, d2, tau, r_opt, points_used, error| EstimateRow {
        system: system.clone(),
        n: run.n,
        k: run.k,
        seed: run.seed_index,
        method,
        beta,
        d2,
        tau,
        r_opt,
        points_used,
        error,
    };
    let mut out = CorrdimOutput::default();
    let (tau, r_opt, fits) = match fits_for_run(plan, cfg, run) {
        Ok(v) => v,
        Err(e) => {
            let tag = Some(e.tag().to_string());
            out.estimates.push(row(FULL, None, None, None, None, None, tag.clone()));
            for &b in &cfg.betas {
                out.estimates
                    .push(row(RANGE, Some(b), None, None, None, None, tag.clone()));
            }
            return out;
        }
    };
    for fit in fits {
        let method = if fit.beta.is_some() { RANGE } else { FULL };
        let (curve, range) = match fit.curve {
            Ok(c) => c,
            Err(e) => {
                out.estimates.push(row(
                    method,
                    fit.beta,
                    None,
                    Some(tau),
                    Some(r_opt),
                    None,
                    Some(e.tag().to_string()),
                ));
                continue;
            }
        };
        match gp_dimension(&curve, range.as_ref()) {
            Ok(est) => out.estimates.push(row(
                method,
                fit.beta,
                Some(est.d2),
                Some(tau),
                Some(r_opt),
                Some(est.points_used),
                None,
            )),
            Err(e) => out.estimates.push(row(
                method,
                fit.beta,
                None,
                Some(tau),
                Some(r_opt),
                None,
                Some(CliError::from(e).tag().to_string()),
            )),
        }
        let used = curve.usable_points(range.as_ref());
        for (i, (&r, &c)) in curve.radii.iter().zip(&curve.sums).enumerate() {
            out.curves.push(CurveRow {
                system: system.clone(),
                n: run.n,
                k: run.k,
                seed: run.seed_index,
                method,
                beta: fit.beta,
                r,
                log_r: r.ln(),
                c,
                log_c: c.ln(),
                in_fit_range: used.contains(&i),
            });
        }
    }
    out
}

/// Runs every (length, noise, seed) combination in parallel; rows come back
/// in run order.
pub fn run_corrdim(cfg: &ExperimentConfig) -> CliResult<CorrdimOutput> {
    cfg.validate()?;
    let plan = Plan::new(cfg)?;
    let parts: Vec<CorrdimOutput> = plan.runs.par_iter().map(|run| rows_for_run(&plan, cfg, run)).collect();
    let mut out = CorrdimOutput::default();
    for p in parts {
        out.estimates.extend(p.estimates);
        out.curves.extend(p.curves);
    }
    Ok(out)
}

pub fn write_corrdim(cfg: &ExperimentConfig, out: &CorrdimOutput, dir: &Path) -> CliResult<()> {
    ensure_dir(dir)?;
    write_rows(&dir.join("estimates.csv"), &out.estimates)?;
    write_rows(&dir.join("curves.csv"), &out.curves)?;
    Manifest::new("corrdim", cfg)
        .file(FileEntry::new(
            "estimates.csv",
            "one row per run and fit method; d2 is the log-log slope, error names the failure class",
            "method/beta",
            "d2",
        ))
        .file(FileEntry::new(
            "curves.csv",
            "correlation sums (self pairs excluded) on each fit grid",
            "log_r",
            "log_C",
        ))
        .write(dir)
}
