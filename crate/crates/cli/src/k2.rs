//! K2 entropy experiment: K2 against log r for every run, the reference
//! radius of each run, per-length confidence bands and an optional MSE
//! table against a known entropy.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use nlradius::rng::derive_seed_path;
use nlradius::stats::{bootstrap_interval, gaussian_ci, mean, mse};
use nlradius::{k2_curve, K2Settings, RadiusSelection};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::io::{ensure_dir, write_rows};
use crate::manifest::{FileEntry, Manifest};
use crate::runs::{Plan, RunKey};

/// `k2_radii` radii with `ln r` evenly spaced over `[log_r_min, log_r_max]`.
pub fn radius_grid(cfg: &ExperimentConfig) -> Vec<f64> {
    let steps = (cfg.k2_radii - 1) as f64;
    (0..cfg.k2_radii)
        .map(|i| (cfg.log_r_min + (cfg.log_r_max - cfg.log_r_min) * i as f64 / steps).exp())
        .collect()
}

pub fn settings(cfg: &ExperimentConfig) -> K2Settings {
    K2Settings {
        m_lo: cfg.m_lo,
        m_hi: cfg.m_hi,
        count_floor: cfg.count_floor,
        ..K2Settings::default()
    }
}

/// Result of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct K2Run {
    pub key: RunKey,
    pub r_opt: Option<f64>,
    pub at_r_opt: Option<f64>,
    /// One entry per grid radius; `None` where flagged.
    pub curve: Vec<Option<f64>>,
    pub error: Option<String>,
}

/// Runs sharing a source, length and noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct K2Group {
    pub system: String,
    pub n: usize,
    pub k: f64,
    pub noise_index: usize,
    pub runs: Vec<K2Run>,
}

impl K2Group {
    /// Non-flagged estimates at grid radius `i` across runs.
    pub fn estimates_at(&self, i: usize) -> Vec<f64> {
        self.runs
            .iter()
            .filter_map(|r| r.curve.get(i).copied().flatten())
            .collect()
    }

    pub fn estimates_at_r_opt(&self) -> Vec<f64> {
        self.runs.iter().filter_map(|r| r.at_r_opt).collect()
    }

    pub fn mean_r_opt(&self) -> Option<f64> {
        let rs: Vec<f64> = self.runs.iter().filter_map(|r| r.r_opt).collect();
        (!rs.is_empty()).then(|| mean(&rs))
    }

    fn file_stem(&self) -> String {
        if self.k > 0.0 {
            format!("k2_curve_{}_N{}_k{}", self.system, self.n, self.k)
        } else {
            format!("k2_curve_{}_N{}", self.system, self.n)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct K2Output {
    pub radii: Vec<f64>,
    pub groups: Vec<K2Group>,
}

fn run_one(plan: &Plan, cfg: &ExperimentConfig, key: &RunKey, radii: &[f64]) -> K2Run {
    let st = settings(cfg);
    let attempt = || -> CliResult<(f64, Option<f64>, Vec<Option<f64>>)> {
        let series = plan.series(cfg, key)?;
        let sel = RadiusSelection::for_series(&series)?;
        let at = match st.estimate(&series, sel.r_opt) {
            Ok(e) => Some(e.k2),
            Err(nlradius::Error::InsufficientStatistics { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let curve = k2_curve(&series, radii, &st)?.into_iter().map(|p| p.k2).collect();
        Ok((sel.r_opt, at, curve))
    };
    match attempt() {
        Ok((r, at, curve)) => K2Run {
            key: key.clone(),
            r_opt: Some(r),
            at_r_opt: at,
            curve,
            error: None,
        },
        Err(e) => K2Run {
            key: key.clone(),
            r_opt: None,
            at_r_opt: None,
            curve: vec![None; radii.len()],
            error: Some(e.tag().to_string()),
        },
    }
}

pub fn run_k2(cfg: &ExperimentConfig) -> CliResult<K2Output> {
    cfg.validate()?;
    let plan = Plan::new(cfg)?;
    let radii = radius_grid(cfg);
    let runs: Vec<K2Run> = plan
        .runs
        .par_iter()
        .map(|key| run_one(&plan, cfg, key, &radii))
        .collect();
    let mut groups: Vec<K2Group> = Vec::new();
    for run in runs {
        let same = groups.last().is_some_and(|g| {
            g.runs[0].key.source == run.key.source && g.n == run.key.n && g.noise_index == run.key.noise_index
        });
        if same {
            groups.last_mut().unwrap().runs.push(run);
        } else {
            groups.push(K2Group {
                system: plan.source(&run.key).label().to_string(),
                n: run.key.n,
                k: run.key.k,
                noise_index: run.key.noise_index,
                runs: vec![run],
            });
        }
    }
    Ok(K2Output { radii, groups })
}

#[derive(Serialize)]
struct BandRow {
    r: f64,
    log_r: f64,
    n_ok: usize,
    mean: Option<f64>,
    sample_std: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
}

#[derive(Serialize)]
struct RunRow<'a> {
    system: &'a str,
    #[serde(rename = "N")]
    n: usize,
    k: f64,
    seed: usize,
    r_opt: Option<f64>,
    log_r_opt: Option<f64>,
    k2_at_r_opt: Option<f64>,
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct EstimateRow<'a> {
    system: &'a str,
    #[serde(rename = "N")]
    n: usize,
    k: f64,
    seed: usize,
    r: f64,
    log_r: f64,
    k2: Option<f64>,
    ok: bool,
}

#[derive(Serialize)]
struct MarkerRow<'a> {
    system: &'a str,
    #[serde(rename = "N")]
    n: usize,
    k: f64,
    runs: usize,
    mean_r_opt: Option<f64>,
    log_mean_r_opt: Option<f64>,
    n_ok: usize,
    k2_mean: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseRow {
    pub system: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: f64,
    /// `grid` for a fixed radius, `r_opt` for each run's own reference radius.
    pub point: &'static str,
    pub r: f64,
    pub log_r: f64,
    pub n_ok: usize,
    pub mse: f64,
    pub log_mse: Option<f64>,
    pub ci_low: f64,
    pub ci_high: f64,
}

fn mse_row(
    cfg: &ExperimentConfig,
    g: &K2Group,
    point: &'static str,
    r: f64,
    estimates: &[f64],
    truth: f64,
    stream: u64,
) -> CliResult<MseRow> {
    let m = mse(estimates, truth);
    let seed = derive_seed_path(cfg.master_seed, &[0x6d7365, g.n as u64, g.noise_index as u64, stream]);
    let (lo, hi) = bootstrap_interval(estimates, |xs| mse(xs, truth), cfg.resamples, seed)?;
    Ok(MseRow {
        system: g.system.clone(),
        n: g.n,
        k: g.k,
        point,
        r,
        log_r: r.ln(),
        n_ok: estimates.len(),
        mse: m,
        log_mse: (m > 0.0).then(|| m.ln()),
        ci_low: lo,
        ci_high: hi,
    })
}

/// MSE against `truth` at every grid radius with at least two estimates,
/// followed by the MSE of the estimates at each run's own `r_opt`.
///
/// Confidence limits are percentile-bootstrap intervals over the run set,
/// recomputing the MSE per resample.
pub fn mse_table(cfg: &ExperimentConfig, out: &K2Output, truth: f64) -> CliResult<Vec<MseRow>> {
    let mut rows = Vec::new();
    for g in &out.groups {
        for (i, &r) in out.radii.iter().enumerate() {
            let est = g.estimates_at(i);
            if est.len() >= 2 {
                rows.push(mse_row(cfg, g, "grid", r, &est, truth, i as u64)?);
            }
        }
        let est = g.estimates_at_r_opt();
        if let (Some(r), true) = (g.mean_r_opt(), est.len() >= 2) {
            rows.push(mse_row(cfg, g, "r_opt", r, &est, truth, u64::MAX)?);
        }
    }
    Ok(rows)
}

pub fn write_k2(cfg: &ExperimentConfig, out: &K2Output, dir: &Path) -> CliResult<()> {
    ensure_dir(dir)?;
    let mut manifest = Manifest::new("k2", cfg);
    let mut runs = Vec::new();
    let mut estimates = Vec::new();
    let mut markers = Vec::new();
    for g in &out.groups {
        let band: Vec<BandRow> = out
            .radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let est = g.estimates_at(i);
                let ci = gaussian_ci(&est).ok();
                BandRow {
                    r,
                    log_r: r.ln(),
                    n_ok: est.len(),
                    mean: (!est.is_empty()).then(|| mean(&est)),
                    sample_std: ci.map(|c| c.sample_std),
                    ci_low: ci.map(|c| c.ci_low),
                    ci_high: ci.map(|c| c.ci_high),
                }
            })
            .collect();
        let name = format!("{}.csv", g.file_stem());
        write_rows(&dir.join(&name), &band)?;
        manifest = manifest.file(FileEntry::new(
            name,
            "mean K2 over runs with a 95% Gaussian band, per radius",
            "log_r",
            "mean",
        ));

        for run in &g.runs {
            runs.push(RunRow {
                system: &g.system,
                n: g.n,
                k: g.k,
                seed: run.key.seed_index,
                r_opt: run.r_opt,
                log_r_opt: run.r_opt.map(f64::ln),
                k2_at_r_opt: run.at_r_opt,
                error: run.error.as_deref(),
            });
            for (i, &r) in out.radii.iter().enumerate() {
                estimates.push(EstimateRow {
                    system: &g.system,
                    n: g.n,
                    k: g.k,
                    seed: run.key.seed_index,
                    r,
                    log_r: r.ln(),
                    k2: run.curve[i],
                    ok: run.curve[i].is_some(),
                });
            }
        }
        let at = g.estimates_at_r_opt();
        let ci = gaussian_ci(&at).ok();
        let r_bar = g.mean_r_opt();
        markers.push(MarkerRow {
            system: &g.system,
            n: g.n,
            k: g.k,
            runs: g.runs.len(),
            mean_r_opt: r_bar,
            log_mean_r_opt: r_bar.map(f64::ln),
            n_ok: at.len(),
            k2_mean: (!at.is_empty()).then(|| mean(&at)),
            ci_low: ci.map(|c| c.ci_low),
            ci_high: ci.map(|c| c.ci_high),
        });
    }
    write_rows(&dir.join("k2_runs.csv"), &runs)?;
    write_rows(&dir.join("k2_estimates.csv"), &estimates)?;
    write_rows(&dir.join("k2_markers.csv"), &markers)?;
    manifest = manifest
        .file(FileEntry::new(
            "k2_runs.csv",
            "reference radius and K2 at it, per run",
            "r_opt",
            "k2_at_r_opt",
        ))
        .file(FileEntry::new(
            "k2_estimates.csv",
            "K2 per run and radius; empty where flagged",
            "log_r",
            "k2",
        ))
        .file(FileEntry::new(
            "k2_markers.csv",
            "mean reference radius per length (vertical marker) and K2 at r_opt",
            "log_mean_r_opt",
            "k2_mean",
        ));
    if let Some(truth) = cfg.truth {
        let rows = mse_table(cfg, out, truth)?;
        write_rows(&dir.join("mse.csv"), &rows)?;
        manifest = manifest.file(FileEntry::new(
            "mse.csv",
            "MSE of K2 against the supplied truth with 95% bootstrap limits",
            "log_r",
            "log_mse",
        ));
    }
    manifest.write(dir)
}
