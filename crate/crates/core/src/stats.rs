//! Descriptive statistics, confidence intervals, MSE curves and Z-tests.
//!
//! Sample variances use the `n - 1` denominator and quantiles use linear
//! interpolation between order statistics throughout the crate.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::rng::{derive_seed, seeded_rng};
use crate::scalar::{count, lit, Real};

/// Two-sided 95% standard-normal quantile.
pub const Z_95: f64 = 1.96;

/// Default number of bootstrap resamples.
pub const DEFAULT_RESAMPLES: usize = 1000;

pub fn mean<T: Real>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / count::<T>(xs.len())
}

/// Sample variance with the `n - 1` denominator (`0` for fewer than 2 values).
pub fn sample_variance<T: Real>(xs: &[T]) -> T {
    if xs.len() < 2 {
        return T::zero();
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / count::<T>(xs.len() - 1)
}

pub fn sample_std<T: Real>(xs: &[T]) -> T {
    sample_variance(xs).sqrt()
}

/// Quantile of already-sorted data, interpolating linearly between order
/// statistics at position `(n - 1) q`.
pub fn quantile_sorted<T: Real>(sorted: &[T], q: T) -> T {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = count::<T>(sorted.len() - 1) * q;
    let lo = h.floor().to_usize().unwrap_or(0).min(sorted.len() - 1);
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - count::<T>(lo);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Quantile of unsorted data.
pub fn quantile<T: Real>(xs: &[T], q: T) -> T {
    let mut v = xs.to_vec();
    sort_reals(&mut v);
    quantile_sorted(&v, q)
}

/// Interquartile range.
pub fn iqr<T: Real>(xs: &[T]) -> T {
    let mut v = xs.to_vec();
    sort_reals(&mut v);
    quantile_sorted(&v, lit(0.75)) - quantile_sorted(&v, lit(0.25))
}

pub fn median<T: Real>(xs: &[T]) -> T {
    quantile(xs, lit(0.5))
}

pub(crate) fn sort_reals<T: Real>(v: &mut [T]) {
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiMethod {
    Gaussian,
    Bootstrap,
}

/// Mean, spread and 95% interval of a set of estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary<T: Real> {
    pub mean: T,
    pub sample_std: T,
    pub ci_low: T,
    pub ci_high: T,
    pub n_samples: usize,
    pub method: CiMethod,
}

fn require_two<T>(xs: &[T]) -> Result<()> {
    if xs.len() < 2 {
        return Err(invalid(format!("need at least 2 samples, got {}", xs.len())));
    }
    Ok(())
}

/// `mean +/- 1.96 s / sqrt(n)`.
pub fn gaussian_ci<T: Real>(samples: &[T]) -> Result<SampleSummary<T>> {
    require_two(samples)?;
    let m = mean(samples);
    let s = sample_std(samples);
    let half = lit::<T>(Z_95) * s / count::<T>(samples.len()).sqrt();
    Ok(SampleSummary {
        mean: m,
        sample_std: s,
        ci_low: m - half,
        ci_high: m + half,
        n_samples: samples.len(),
        method: CiMethod::Gaussian,
    })
}

/// Percentile bootstrap (2.5%, 97.5%) of an arbitrary statistic.
///
/// Resample `b` draws from its own generator seeded with
/// `derive_seed(seed, b)`, so the interval is identical for any thread count.
pub fn bootstrap_interval<T, F>(samples: &[T], statistic: F, resamples: usize, seed: u64) -> Result<(T, T)>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    require_two(samples)?;
    if resamples < 100 {
        return Err(invalid(format!("need at least 100 resamples, got {resamples}")));
    }
    let n = samples.len();
    let mut stats: Vec<T> = (0..resamples as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = seeded_rng(derive_seed(seed, b));
            let draw: Vec<T> = (0..n).map(|_| samples[rng.random_range(0..n)]).collect();
            statistic(&draw)
        })
        .collect();
    if stats.iter().any(|v| v.is_nan()) {
        return Err(Error::Degenerate("bootstrap statistic produced NaN".into()));
    }
    sort_reals(&mut stats);
    Ok((quantile_sorted(&stats, lit(0.025)), quantile_sorted(&stats, lit(0.975))))
}

/// Percentile bootstrap interval of the mean.
pub fn bootstrap_ci<T: Real>(samples: &[T], resamples: usize, seed: u64) -> Result<SampleSummary<T>> {
    let (lo, hi) = bootstrap_interval(samples, mean, resamples, seed)?;
    let m = mean(samples);
    Ok(SampleSummary {
        mean: m,
        sample_std: sample_std(samples),
        // percentile endpoints of a convex statistic can sit a rounding
        // error away from the sample mean
        ci_low: lo.min(m),
        ci_high: hi.max(m),
        n_samples: samples.len(),
        method: CiMethod::Bootstrap,
    })
}

/// Squared bias plus sample variance of estimates around `truth`.
pub fn mse<T: Real>(estimates: &[T], truth: T) -> T {
    let bias = mean(estimates) - truth;
    bias * bias + sample_variance(estimates)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsePoint<T: Real> {
    pub r: T,
    pub mse: T,
    /// Natural log of the MSE; `None` when the MSE is exactly zero.
    pub log_mse: Option<T>,
}

/// MSE of the estimates at each radius.
pub fn mse_curve<T: Real>(estimates_per_r: &[(T, Vec<T>)], truth: T) -> Result<Vec<MsePoint<T>>> {
    if estimates_per_r.is_empty() {
        return Err(invalid("no radii supplied"));
    }
    estimates_per_r
        .iter()
        .map(|(r, xs)| {
            require_two(xs)?;
            let m = mse(xs, truth);
            Ok(MsePoint {
                r: *r,
                mse: m,
                log_mse: (m > T::zero()).then(|| m.ln()),
            })
        })
        .collect()
}

/// Two-sample Z statistic `(mean_a - mean_b) / sqrt(s_a^2/n_a + s_b^2/n_b)`.
pub fn two_sample_z<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    require_two(a)?;
    require_two(b)?;
    let se2 = sample_variance(a) / count::<T>(a.len()) + sample_variance(b) / count::<T>(b.len());
    if !(se2 > T::zero()) {
        return Err(Error::Degenerate("both groups have zero variance".into()));
    }
    Ok((mean(a) - mean(b)) / se2.sqrt())
}
