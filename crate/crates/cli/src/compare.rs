//! Two-group comparison of K2 estimates under several radius rules.

use serde::Serialize;

use nlradius::stats::mean;
use nlradius::{baseline_radius, two_sample_z, BaselineRule, K2Settings, RadiusSelection, Series};

use crate::error::{CliError, CliResult};
use crate::runs::scalar_trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    Reference,
    Baseline(BaselineRule<f64>),
}

/// The six rules of the comparison, in table order.
pub const RULES: [(&str, Rule); 6] = [
    ("reference", Rule::Reference),
    ("0.2sigma", Rule::Baseline(BaselineRule::FractionOfSigma(0.2))),
    ("0.1sigma", Rule::Baseline(BaselineRule::FractionOfSigma(0.1))),
    ("0.1max_extent", Rule::Baseline(BaselineRule::FractionOfMaxExtent(0.1))),
    ("rr0.10", Rule::Baseline(BaselineRule::FixedRecurrenceRate(0.10))),
    ("rr0.04", Rule::Baseline(BaselineRule::FixedRecurrenceRate(0.04))),
];

impl Rule {
    pub fn radius(&self, series: &Series) -> nlradius::Result<f64> {
        match *self {
            Rule::Reference => RadiusSelection::for_series(series).map(|s| s.r_opt),
            Rule::Baseline(rule) => baseline_radius(&scalar_trajectory(series), rule),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleRow {
    pub rule: &'static str,
    pub z: Option<f64>,
    pub mean_a: Option<f64>,
    pub mean_b: Option<f64>,
    pub n_a: usize,
    pub n_b: usize,
    pub error: Option<String>,
}

/// Splits every series into consecutive segments of `len` samples
/// (dropping a shorter tail), or keeps them whole with `None`.
pub fn segments(series: &[Series], len: Option<usize>) -> CliResult<Vec<Series>> {
    let Some(len) = len else {
        return Ok(series.to_vec());
    };
    let mut out = Vec::new();
    for s in series {
        if len < 2 || len > s.len() {
            return Err(CliError::Argument(format!(
                "segment length {len} does not fit a series of {} samples",
                s.len()
            )));
        }
        for k in 0..s.len() / len {
            out.push(s.segment(k * len, len)?);
        }
    }
    Ok(out)
}

fn group_estimates(group: &[Series], rule: Rule, settings: &K2Settings) -> Vec<f64> {
    group
        .iter()
        .filter_map(|s| {
            let r = rule.radius(s).ok()?;
            settings.estimate(s, r).ok().map(|e| e.k2)
        })
        .collect()
}

/// K2 of every segment under each rule, then a two-sample Z-test between
/// the groups. Segments where a rule or the estimate fails are skipped and
/// show up in the counts.
pub fn compare_rules(a: &[Series], b: &[Series], settings: &K2Settings) -> Vec<RuleRow> {
    RULES
        .iter()
        .map(|&(name, rule)| {
            let ea = group_estimates(a, rule, settings);
            let eb = group_estimates(b, rule, settings);
            let mean_or = |v: &[f64]| (!v.is_empty()).then(|| mean(v));
            let (z, error) = if ea.len() < 2 || eb.len() < 2 {
                (None, Some("insufficient-statistics".to_string()))
            } else {
                match two_sample_z(&ea, &eb) {
                    Ok(z) => (Some(z), None),
                    Err(e) => (None, Some(CliError::from(e).tag().to_string())),
                }
            };
            RuleRow {
                rule: name,
                z,
                mean_a: mean_or(&ea),
                mean_b: mean_or(&eb),
                n_a: ea.len(),
                n_b: eb.len(),
                error,
            }
        })
        .collect()
}
