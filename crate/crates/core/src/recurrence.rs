//! Recurrence plots, diagonal-line histograms and K2 entropy estimation.
//!
//! `N(m)` counts index pairs `(i, j)` whose scalar samples stay within `eps`
//! of each other for `m` consecutive steps. Its decay rate in `m` estimates
//! the K2 entropy: `N(m) ~ exp(-K2 m dt)`.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::correlation::{ols, SelfPairs};
use crate::error::{invalid, Error, Result};
use crate::norm::NormKind;
use crate::scalar::{count, Real};
use crate::series::{TimeSeries, Trajectory};

/// Default lower bound on `N(m)` for a usable K2 fit.
pub const DEFAULT_COUNT_FLOOR: u64 = 10;
/// Default line-length fit range.
pub const DEFAULT_M_RANGE: (usize, usize) = (2, 8);

fn check_eps<T: Real>(eps: T) -> Result<()> {
    if eps > T::zero() && eps.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("threshold must be positive and finite, got {eps}")))
    }
}

/// Thresholded distance matrix `R_ij = ||x_i - x_j|| < eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceMatrix<T: Real> {
    bits: Vec<bool>,
    n: usize,
    pub epsilon: T,
    pub norm: NormKind,
}

impl<T: Real> RecurrenceMatrix<T> {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn recurrent_points(&self) -> u64 {
        self.bits.iter().filter(|&&b| b).count() as u64
    }

    /// Recurrence rate: the fraction of recurrent entries.
    pub fn rate(&self) -> T {
        T::from_u64(self.recurrent_points()).unwrap() / count::<T>(self.n * self.n)
    }

    /// Plain PBM (P1); recurrent entries are black (`1`).
    pub fn write_pbm<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "P1")?;
        writeln!(out, "{} {}", self.n, self.n)?;
        for i in 0..self.n {
            // lines of at most 70 characters
            for chunk in self.bits[i * self.n..(i + 1) * self.n].chunks(35) {
                let line: Vec<&str> = chunk.iter().map(|&b| if b { "1" } else { "0" }).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
        Ok(())
    }

    /// CSV of the recurrent `(i, j)` entries.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "i,j")?;
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    writeln!(out, "{i},{j}")?;
                }
            }
        }
        Ok(())
    }
}

pub fn recurrence_matrix<T: Real>(traj: &Trajectory<T>, epsilon: T) -> Result<RecurrenceMatrix<T>> {
    check_eps(epsilon)?;
    let n = traj.len();
    let bits: Vec<bool> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| (0..n).map(move |j| traj.dist(i, j) < epsilon))
        .collect();
    Ok(RecurrenceMatrix {
        bits,
        n,
        epsilon,
        norm: traj.norm(),
    })
}

/// `N(m)` for `m = 1..=m_max` on a scalar series.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalHistogram<T: Real> {
    /// `counts[m - 1] = N(m)`.
    pub counts: Vec<u64>,
    pub epsilon: T,
    /// Series length.
    pub n: usize,
    pub self_pairs: SelfPairs,
}

impl<T: Real> DiagonalHistogram<T> {
    pub fn m_max(&self) -> usize {
        self.counts.len()
    }

    /// `N(m)` for `1 <= m <= m_max`.
    pub fn count(&self, m: usize) -> u64 {
        self.counts[m - 1]
    }

    /// Pairs with `i != j` in `N(m)`.
    pub fn cross_count(&self, m: usize) -> u64 {
        match self.self_pairs {
            SelfPairs::Include => self.count(m) - (self.n - m + 1) as u64,
            SelfPairs::Exclude => self.count(m),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "m,count,log_count")?;
        for (m, &c) in (1..).zip(&self.counts) {
            writeln!(out, "{m},{c},{}", (c as f64).ln())?;
        }
        Ok(())
    }
}

/// Adds the windows of one maximal run of `len` matches to `acc`.
#[inline]
fn add_run(acc: &mut [u64], len: usize) {
    for (m, slot) in (1..=len.min(acc.len())).zip(acc.iter_mut()) {
        *slot += (len - m + 1) as u64;
    }
}

/// Diagonal-line histogram with self pairs included.
pub fn diagonal_histogram<T: Real>(series: &TimeSeries<T>, epsilon: T, m_max: usize) -> Result<DiagonalHistogram<T>> {
    diagonal_histogram_with(series, epsilon, m_max, SelfPairs::Include)
}

/// Diagonal-line histogram `N(m) = #{(i, j) : |u_{i+k} - u_{j+k}| < eps for
/// k = 0..m-1}`.
///
/// Each diagonal offset is scanned once; a maximal run of `L` consecutive
/// matches holds `L - m + 1` windows of length `m`. Offsets `j - i` and
/// `i - j` are mirror images, so only positive offsets are scanned.
pub fn diagonal_histogram_with<T: Real>(
    series: &TimeSeries<T>,
    epsilon: T,
    m_max: usize,
    self_pairs: SelfPairs,
) -> Result<DiagonalHistogram<T>> {
    check_eps(epsilon)?;
    let u = series.values();
    let n = u.len();
    if m_max == 0 || m_max >= n {
        return Err(invalid(format!(
            "line length bound must satisfy 1 <= m_max < N = {n}, got {m_max}"
        )));
    }
    let cross = (1..n)
        .into_par_iter()
        .fold(
            || vec![0u64; m_max],
            |mut acc, off| {
                let mut run = 0usize;
                for i in 0..n - off {
                    if (u[i] - u[i + off]).abs() < epsilon {
                        run += 1;
                    } else if run > 0 {
                        add_run(&mut acc, run);
                        run = 0;
                    }
                }
                if run > 0 {
                    add_run(&mut acc, run);
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; m_max],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let counts = cross
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let m = k + 1;
            let own = match self_pairs {
                SelfPairs::Include => (n - m + 1) as u64,
                SelfPairs::Exclude => 0,
            };
            2 * c + own
        })
        .collect();
    Ok(DiagonalHistogram {
        counts,
        epsilon,
        n,
        self_pairs,
    })
}

/// K2 entropy estimate from the decay of `N(m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate<T: Real> {
    /// Nats per time unit.
    pub k2: T,
    pub r_used: T,
    pub m_range: (usize, usize),
    pub dt: T,
}

/// `K2 = -(1 / dt) * slope of ln N(m) against m` over `m_lo..=m_hi`.
///
/// Every `N(m)` for `m` in `m_lo..=m_hi + 1` that the histogram holds must
/// reach `count_floor`; with self pairs included the floor applies to the
/// pairs with `i != j`, since the `N - m + 1` diagonal entries alone carry no
/// information about the dynamics.
pub fn k2_estimate<T: Real>(
    hist: &DiagonalHistogram<T>,
    dt: T,
    m_lo: usize,
    m_hi: usize,
    count_floor: u64,
) -> Result<EntropyEstimate<T>> {
    if !(dt > T::zero()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    if m_lo < 1 || m_hi <= m_lo {
        return Err(invalid(format!("need 1 <= m_lo < m_hi, got [{m_lo}, {m_hi}]")));
    }
    if m_hi > hist.m_max() {
        return Err(invalid(format!(
            "histogram holds m <= {}, fit needs m_hi = {m_hi}",
            hist.m_max()
        )));
    }
    let check_hi = (m_hi + 1).min(hist.m_max());
    for m in m_lo..=check_hi {
        let c = hist.cross_count(m);
        if c < count_floor {
            return Err(Error::InsufficientStatistics {
                m,
                count: c,
                floor: count_floor,
            });
        }
    }
    let x: Vec<T> = (m_lo..=m_hi).map(count::<T>).collect();
    let y: Vec<T> = (m_lo..=m_hi)
        .map(|m| T::from_u64(hist.count(m)).unwrap().ln())
        .collect();
    let (slope, _, _) = ols(&x, &y);
    Ok(EntropyEstimate {
        k2: -slope / dt,
        r_used: hist.epsilon,
        m_range: (m_lo, m_hi),
        dt,
    })
}

/// One point of a K2-versus-radius curve; `k2` is `None` where the counts
/// fell below the floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K2Point<T: Real> {
    pub r: T,
    pub k2: Option<T>,
}

impl<T: Real> K2Point<T> {
    pub fn ok(&self) -> bool {
        self.k2.is_some()
    }
}

/// Settings shared by K2 estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct K2Settings {
    pub m_lo: usize,
    pub m_hi: usize,
    pub count_floor: u64,
    /// Whether the line of identity enters `N(m)`; excluded by default.
    pub self_pairs: SelfPairs,
}

impl Default for K2Settings {
    fn default() -> Self {
        Self {
            m_lo: DEFAULT_M_RANGE.0,
            m_hi: DEFAULT_M_RANGE.1,
            count_floor: DEFAULT_COUNT_FLOOR,
            self_pairs: SelfPairs::Exclude,
        }
    }
}

impl K2Settings {
    /// Histogram and K2 estimate at a single radius.
    pub fn estimate<T: Real>(&self, series: &TimeSeries<T>, r: T) -> Result<EntropyEstimate<T>> {
        let m_max = (self.m_hi + 1).min(series.len() - 1);
        let hist = diagonal_histogram_with(series, r, m_max, self.self_pairs)?;
        k2_estimate(&hist, series.dt(), self.m_lo, self.m_hi, self.count_floor)
    }
}

/// K2 at every radius of the grid, flagging radii with too few pairs.
pub fn k2_curve<T: Real>(series: &TimeSeries<T>, radii: &[T], settings: &K2Settings) -> Result<Vec<K2Point<T>>> {
    if radii.iter().any(|&r| !(r > T::zero())) {
        return Err(invalid("radii must be positive"));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("radius grid must be strictly increasing"));
    }
    radii
        .iter()
        .map(|&r| match settings.estimate(series, r) {
            Ok(e) => Ok(K2Point { r, k2: Some(e.k2) }),
            Err(Error::InsufficientStatistics { .. }) => Ok(K2Point { r, k2: None }),
            Err(e) => Err(e),
        })
        .collect()
}

/// Writes `r,log_r,k2,ok` rows.
pub fn write_k2_curve_csv<T: Real, W: Write>(points: &[K2Point<T>], mut out: W) -> io::Result<()> {
    writeln!(out, "r,log_r,k2,ok")?;
    for p in points {
        match p.k2 {
            Some(k) => writeln!(out, "{},{},{},true", p.r, p.r.ln(), k)?,
            None => writeln!(out, "{},{},,false", p.r, p.r.ln())?,
        }
    }
    Ok(())
}
