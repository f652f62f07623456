//! Delay-coordinate reconstruction and mutual-information delay selection.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::norm::NormKind;
use crate::scalar::{count, Real};
use crate::series::{TimeSeries, Trajectory};

/// Number of equal-width bins per axis in the mutual-information histogram.
pub const MI_BINS: usize = 64;

/// Embedding dimension and delay (in samples).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingSpec {
    pub dim: usize,
    pub tau: usize,
}

impl EmbeddingSpec {
    pub fn new(dim: usize, tau: usize) -> Self {
        Self { dim, tau }
    }

    /// Samples needed for at least two reconstructed points.
    pub fn min_series_len(&self) -> usize {
        (self.dim.saturating_sub(1)) * self.tau + 2
    }

    /// Points produced from a series of `len` samples.
    pub fn embedded_len(&self, len: usize) -> Option<usize> {
        len.checked_sub((self.dim.saturating_sub(1)) * self.tau)
    }
}

/// `x_i = (u_i, u_{i+tau}, ..., u_{i+(d-1)tau})` for `i = 0..N-(d-1)tau`.
pub fn delay_embed<T: Real>(series: &TimeSeries<T>, spec: EmbeddingSpec, norm: NormKind) -> Result<Trajectory<T>> {
    if spec.dim == 0 || spec.tau == 0 {
        return Err(invalid(format!(
            "embedding needs dim >= 1 and tau >= 1, got dim={} tau={}",
            spec.dim, spec.tau
        )));
    }
    let required = spec.min_series_len();
    if series.len() < required {
        return Err(Error::SeriesTooShort {
            required,
            actual: series.len(),
        });
    }
    let n = series.len() - (spec.dim - 1) * spec.tau;
    let u = series.values();
    let mut coords = Vec::with_capacity(n * spec.dim);
    for i in 0..n {
        coords.extend((0..spec.dim).map(|k| u[i + k * spec.tau]));
    }
    Trajectory::from_flat(coords, spec.dim, spec.tau, norm)
}

/// Plug-in mutual information (nats) between `u_t` and `u_{t+tau}` on a
/// `bins x bins` equal-width histogram spanning the series range.
pub fn delayed_mutual_information<T: Real>(values: &[T], tau: usize, bins: usize) -> Result<T> {
    if bins < 2 {
        return Err(invalid("need at least 2 bins"));
    }
    if tau >= values.len() {
        return Err(Error::SeriesTooShort {
            required: tau + 1,
            actual: values.len(),
        });
    }
    let (lo, hi) = min_max(values);
    if !(hi > lo) {
        return Err(Error::Degenerate(
            "constant series has no mutual information structure".into(),
        ));
    }
    let idx: Vec<usize> = values.iter().map(|&v| bin_index(v, lo, hi, bins)).collect();
    Ok(mi_from_indices(&idx, tau, bins))
}

fn min_max<T: Real>(values: &[T]) -> (T, T) {
    values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
        (if v < lo { v } else { lo }, if v > hi { v } else { hi })
    })
}

fn bin_index<T: Real>(v: T, lo: T, hi: T, bins: usize) -> usize {
    let pos = (v - lo) / (hi - lo) * count::<T>(bins);
    pos.floor().to_usize().unwrap_or(0).min(bins - 1)
}

fn mi_from_indices<T: Real>(idx: &[usize], tau: usize, bins: usize) -> T {
    let pairs = idx.len() - tau;
    let mut joint = vec![0u64; bins * bins];
    for t in 0..pairs {
        joint[idx[t] * bins + idx[t + tau]] += 1;
    }
    // marginals come from the joint table so the estimate is exactly
    // symmetric under swapping the two variables
    let mut row = vec![0u64; bins];
    let mut col = vec![0u64; bins];
    for a in 0..bins {
        for b in 0..bins {
            let c = joint[a * bins + b];
            row[a] += c;
            col[b] += c;
        }
    }
    let total = count::<T>(pairs);
    let mut mi = T::zero();
    for a in 0..bins {
        for b in 0..bins {
            let c = joint[a * bins + b];
            if c == 0 {
                continue;
            }
            let pab = T::from_u64(c).unwrap() / total;
            let ratio = T::from_u64(c).unwrap() * total / (T::from_u64(row[a]).unwrap() * T::from_u64(col[b]).unwrap());
            mi = mi + pab * ratio.ln();
        }
    }
    if mi < T::zero() {
        T::zero()
    } else {
        mi
    }
}

/// Outcome of the first-minimum delay search.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySelection<T: Real> {
    pub tau: usize,
    /// `true` when the mutual-information curve had a first local minimum;
    /// `false` means `tau` is only the argmin of the scanned range.
    pub interior_minimum: bool,
    /// `I(tau)` for `tau = 1..=max_tau` (index `k` holds `I(k + 1)`).
    pub curve: Vec<T>,
}

/// Delay at the first local minimum of the delayed mutual information.
///
/// A local minimum only counts when the curve carries structure above the
/// plug-in estimator's independence level: for independent variables the
/// histogram estimate fluctuates around `(B_x - 1)(B_y - 1) / (2 N)` with
/// standard deviation about `sqrt(2 (B_x - 1)(B_y - 1)) / (2 N)`, and a curve
/// that never rises five of those deviations above that level is treated as
/// featureless (flagged argmin).
pub fn select_delay_mi<T: Real>(series: &TimeSeries<T>, max_tau: usize, bins: usize) -> Result<DelaySelection<T>> {
    let values = series.values();
    if max_tau < 2 {
        return Err(invalid(format!("max_tau must be at least 2, got {max_tau}")));
    }
    if max_tau + 2 > values.len() {
        return Err(Error::SeriesTooShort {
            required: max_tau + 2,
            actual: values.len(),
        });
    }
    if bins < 2 {
        return Err(invalid("need at least 2 bins"));
    }
    let (lo, hi) = min_max(values);
    if !(hi > lo) {
        return Err(Error::Degenerate(
            "constant series has no mutual information structure".into(),
        ));
    }
    let idx: Vec<usize> = values.iter().map(|&v| bin_index(v, lo, hi, bins)).collect();
    let curve: Vec<T> = (1..=max_tau)
        .into_par_iter()
        .map(|tau| mi_from_indices(&idx, tau, bins))
        .collect();

    let argmin = curve
        .iter()
        .enumerate()
        .fold(0, |best, (k, v)| if *v < curve[best] { k } else { best });
    let flagged = |curve: Vec<T>| DelaySelection {
        tau: argmin + 1,
        interior_minimum: false,
        curve,
    };

    let mut occupied = vec![false; bins];
    idx.iter().for_each(|&b| occupied[b] = true);
    let dof = count::<T>(occupied.iter().filter(|&&o| o).count().saturating_sub(1)).powi(2);
    let pairs = count::<T>(values.len() - max_tau);
    let two = count::<T>(2);
    let floor = dof / (two * pairs) + count::<T>(5) * (two * dof).sqrt() / (two * pairs);
    if !curve.iter().any(|&v| v > floor) {
        return Ok(flagged(curve));
    }

    // first k with I(k-1) > I(k) < I(k+1); a flat bottom resolves to its
    // first sample
    for k in 1..curve.len().saturating_sub(1) {
        if curve[k - 1] > curve[k] {
            let mut end = k;
            while end + 1 < curve.len() && curve[end + 1] == curve[k] {
                end += 1;
            }
            if end + 1 < curve.len() && curve[end + 1] > curve[k] {
                return Ok(DelaySelection {
                    tau: k + 1,
                    interior_minimum: true,
                    curve,
                });
            }
        }
    }
    Ok(flagged(curve))
}

/// Default scan limit: a tenth of the series length (at least 2).
pub fn default_max_tau(len: usize) -> usize {
    (len / 10).max(2)
}
