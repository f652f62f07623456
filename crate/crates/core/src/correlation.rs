//! Correlation sums and Grassberger-Procaccia dimension estimation.

use std::io::{self, Write};

use crate::error::{invalid, Error, Result};
use crate::norm::NormKind;
use crate::pairs::pair_counts_below;
use crate::radius::RadiusRange;
use crate::scalar::{count, lit, Real};
use crate::series::Trajectory;

/// Whether the `i = j` terms enter a pair count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfPairs {
    /// Sum over all `n^2` ordered pairs, divide by `n^2`.
    #[default]
    Include,
    /// Sum over the `n (n - 1)` ordered pairs with `i != j`.
    Exclude,
}

impl SelfPairs {
    fn normalize<T: Real>(self, cross_pairs: u64, n: usize) -> T {
        let ordered = count::<T>(2) * T::from_u64(cross_pairs).unwrap();
        match self {
            SelfPairs::Include => (ordered + count::<T>(n)) / count::<T>(n * n),
            SelfPairs::Exclude => ordered / count::<T>(n * (n - 1)),
        }
    }
}

fn check_radius<T: Real>(r: T) -> Result<()> {
    if r > T::zero() && r.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("radius must be positive and finite, got {r}")))
    }
}

/// `C(r, n) = n^-2 #{(i, j) : ||x_i - x_j|| < r}`, self pairs included.
pub fn correlation_sum<T: Real>(traj: &Trajectory<T>, r: T) -> Result<T> {
    correlation_sum_with(traj, r, SelfPairs::Include)
}

pub fn correlation_sum_with<T: Real>(traj: &Trajectory<T>, r: T, self_pairs: SelfPairs) -> Result<T> {
    check_radius(r)?;
    let cross = pair_counts_below(traj, &[r])[0];
    Ok(self_pairs.normalize(cross, traj.len()))
}

/// Correlation sums over a radius grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve<T: Real> {
    pub radii: Vec<T>,
    pub sums: Vec<T>,
    /// Unordered distinct-point pairs `i < j` within each radius.
    pub cross_pairs: Vec<u64>,
    pub n: usize,
    pub norm: NormKind,
    pub self_pairs: SelfPairs,
}

impl<T: Real> CorrelationCurve<T> {
    /// Indices of the points a fit restricted to `range` would use.
    pub fn usable_points(&self, range: Option<&RadiusRange<T>>) -> Vec<usize> {
        let plateau = T::one() - lit::<T>(1e-12);
        (0..self.radii.len())
            .filter(|&k| range.is_none_or(|rg| rg.contains(self.radii[k])))
            .filter(|&k| self.cross_pairs[k] > 0 && self.sums[k] < plateau)
            .collect()
    }

    /// Writes `r,log_r,C,log_C,in_fit_range` rows.
    pub fn write_csv<W: Write>(&self, mut out: W, range: Option<&RadiusRange<T>>) -> io::Result<()> {
        let used = self.usable_points(range);
        writeln!(out, "r,log_r,C,log_C,in_fit_range")?;
        for (k, (&r, &c)) in self.radii.iter().zip(&self.sums).enumerate() {
            writeln!(out, "{},{},{},{},{}", r, r.ln(), c, c.ln(), used.contains(&k))?;
        }
        Ok(())
    }
}

fn validate_grid<T: Real>(radii: &[T]) -> Result<()> {
    if radii.is_empty() {
        return Err(invalid("radius grid is empty"));
    }
    for &r in radii {
        check_radius(r)?;
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("radius grid must be strictly increasing"));
    }
    Ok(())
}

/// Correlation sums for every radius of the grid from one pass over the
/// pairwise distances.
pub fn correlation_curve<T: Real>(traj: &Trajectory<T>, radii: &[T]) -> Result<CorrelationCurve<T>> {
    correlation_curve_with(traj, radii, SelfPairs::Include)
}

pub fn correlation_curve_with<T: Real>(
    traj: &Trajectory<T>,
    radii: &[T],
    self_pairs: SelfPairs,
) -> Result<CorrelationCurve<T>> {
    validate_grid(radii)?;
    let cross_pairs = pair_counts_below(traj, radii);
    let sums = cross_pairs
        .iter()
        .map(|&c| self_pairs.normalize(c, traj.len()))
        .collect();
    Ok(CorrelationCurve {
        radii: radii.to_vec(),
        sums,
        cross_pairs,
        n: traj.len(),
        norm: traj.norm(),
        self_pairs,
    })
}

/// `count` geometrically spaced radii from `lo` to `hi` inclusive.
pub fn geometric_grid<T: Real>(lo: T, hi: T, count_: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi > lo) || !hi.is_finite() {
        return Err(invalid(format!(
            "grid bounds must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if count_ < 2 {
        return Err(invalid("grid needs at least 2 points"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let steps = count::<T>(count_ - 1);
    let mut grid: Vec<T> = (0..count_)
        .map(|k| (a + (b - a) * count::<T>(k) / steps).exp())
        .collect();
    grid[0] = lo;
    grid[count_ - 1] = hi;
    Ok(grid)
}

/// Full-range grid lower bound.
pub const FULL_RANGE_LOWER: f64 = 1e-8;
/// Full-range grid upper bound, in units of the sample standard deviation.
pub const FULL_RANGE_SIGMAS: f64 = 2.0;
/// Radii per grid.
pub const DEFAULT_GRID_POINTS: usize = 20;

/// Slope of `ln C` against `ln r` over a scaling region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionEstimate<T: Real> {
    pub d2: T,
    pub intercept: T,
    /// Smallest and largest radius actually used in the fit.
    pub fit_range: (T, T),
    pub points_used: usize,
    /// Root-mean-square residual of the regression in log space.
    pub residual: T,
}

/// Ordinary least-squares line through `(x, y)`, returning
/// `(slope, intercept, rms residual)`.
pub fn ols<T: Real>(x: &[T], y: &[T]) -> (T, T, T) {
    let n = count::<T>(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum::<T>();
    (slope, intercept, (ss / n).sqrt())
}

/// Correlation dimension as the log-log slope of the curve, restricted to
/// `range` (or the whole curve with `None`).
///
/// Radii without any distinct-point pair and radii on the saturation plateau
/// `C = 1` are left out of the fit.
pub fn gp_dimension<T: Real>(
    curve: &CorrelationCurve<T>,
    range: Option<&RadiusRange<T>>,
) -> Result<DimensionEstimate<T>> {
    let used = curve.usable_points(range);
    if used.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} usable radii in the fit range (need 2)",
            used.len()
        )));
    }
    let x: Vec<T> = used.iter().map(|&k| curve.radii[k].ln()).collect();
    let y: Vec<T> = used.iter().map(|&k| curve.sums[k].ln()).collect();
    let (slope, intercept, residual) = ols(&x, &y);
    Ok(DimensionEstimate {
        d2: slope,
        intercept,
        fit_range: (curve.radii[used[0]], curve.radii[*used.last().unwrap()]),
        points_used: used.len(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radius::{radius_range, RadiusSelection};
    use crate::rng::seeded_rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn line(points: &[f64]) -> Trajectory<f64> {
        let rows: Vec<Vec<f64>> = points.iter().map(|&p| vec![p]).collect();
        Trajectory::from_points(&rows, NormKind::Linf).unwrap()
    }

    fn naive_sum(t: &Trajectory<f64>, r: f64) -> f64 {
        let n = t.len();
        let mut c = 0usize;
        for i in 0..n {
            for j in 0..n {
                if t.dist(i, j) < r {
                    c += 1;
                }
            }
        }
        c as f64 / (n * n) as f64
    }

    #[test]
    fn two_point_sums() {
        let t = line(&[0.0, 1.0]);
        assert_eq!(correlation_sum(&t, 0.5).unwrap(), 0.5);
        assert_eq!(correlation_sum(&t, 2.0).unwrap(), 1.0);
        // open ball: distance exactly r is excluded
        assert_eq!(correlation_sum(&t, 1.0).unwrap(), 0.5);
        assert!(correlation_sum(&t, 0.0).is_err());
        let c = correlation_curve(&t, &[0.5, 2.0]).unwrap();
        assert_eq!(c.sums, vec![0.5, 1.0]);
        assert_eq!(correlation_sum_with(&t, 2.0, SelfPairs::Exclude).unwrap(), 1.0);
        assert_eq!(correlation_sum_with(&t, 0.5, SelfPairs::Exclude).unwrap(), 0.0);
    }

    #[test]
    fn random_points_match_double_loop() {
        let mut rng = seeded_rng(1);
        let rows: Vec<Vec<f64>> = (0..20).map(|_| vec![rng.random(), rng.random()]).collect();
        for norm in NormKind::ALL {
            let t = Trajectory::from_points(&rows, norm).unwrap();
            for r in [0.05, 0.1, 0.3, 0.7, 1.5] {
                assert_eq!(correlation_sum(&t, r).unwrap(), naive_sum(&t, r));
            }
        }
    }

    #[test]
    fn limits() {
        let mut rng = seeded_rng(2);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.random(), rng.random(), rng.random()])
            .collect();
        let t = Trajectory::from_points(&rows, NormKind::L2).unwrap();
        assert_eq!(correlation_sum(&t, 1e3).unwrap(), 1.0);
        assert_eq!(correlation_sum(&t, 1e-12).unwrap(), 1.0 / 50.0);
    }

    #[test]
    fn grid_validation() {
        let t = line(&[0.0, 1.0, 3.0]);
        assert!(correlation_curve(&t, &[]).is_err());
        assert!(correlation_curve(&t, &[1.0, 0.5]).is_err());
        assert!(correlation_curve(&t, &[-1.0, 0.5]).is_err());
        let g = geometric_grid(1e-3, 10.0, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!((g[0], g[4]), (1e-3, 10.0));
        assert_relative_eq!(g[2], 0.1, max_relative = 1e-12);
        assert!(geometric_grid(1.0, 1.0, 5).is_err());
    }

    fn exact_power_law(exponent: f64) -> CorrelationCurve<f64> {
        let radii: Vec<f64> = (1..=10).map(|k| 0.05 * k as f64).collect();
        CorrelationCurve {
            sums: radii.iter().map(|r| r.powf(exponent)).collect(),
            cross_pairs: vec![1; 10],
            radii,
            n: 100,
            norm: NormKind::L2,
            self_pairs: SelfPairs::Include,
        }
    }

    #[test]
    fn slope_of_exact_power_law() {
        let est = gp_dimension(&exact_power_law(2.0), None).unwrap();
        assert_relative_eq!(est.d2, 2.0, epsilon = 1e-10);
        assert_eq!(est.points_used, 10);
        assert!(est.residual < 1e-12);
    }

    #[test]
    fn fit_excludes_plateau_and_empty_radii() {
        let mut c = exact_power_law(1.0);
        c.sums[9] = 1.0;
        c.cross_pairs[0] = 0;
        let est = gp_dimension(&c, None).unwrap();
        assert_eq!(est.points_used, 8);
        assert_eq!(est.fit_range, (c.radii[1], c.radii[8]));
    }

    #[test]
    fn too_narrow_range_is_insufficient() {
        let c = exact_power_law(2.0);
        let sel = RadiusSelection {
            r_opt: 0.12,
            alpha: 1.0,
            spread: 1.0,
            n: 100,
            d: 2,
            norm: NormKind::L2,
        };
        let rg = radius_range(&sel, 0.9).unwrap();
        assert!(matches!(gp_dimension(&c, Some(&rg)), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn uniform_square_dimension() {
        let mut rng = seeded_rng(17);
        let rows: Vec<Vec<f64>> = (0..2000).map(|_| vec![rng.random(), rng.random()]).collect();
        let t = Trajectory::from_points(&rows, NormKind::L2).unwrap();
        let sel = RadiusSelection::for_trajectory(&t).unwrap();
        let rg = sel.range(0.1).unwrap();
        let grid = geometric_grid(rg.lower, rg.upper, 20).unwrap();
        let curve = correlation_curve_with(&t, &grid, SelfPairs::Exclude).unwrap();

        // independent check of the sums and the regression
        let n = t.len() as f64;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &r in &grid {
            let c = (naive_sum(&t, r) * n * n - n) / (n * (n - 1.0));
            xs.push(r.ln());
            ys.push(c.ln());
        }
        let k = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / k;
        let my = ys.iter().sum::<f64>() / k;
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();

        let est = gp_dimension(&curve, Some(&rg)).unwrap();
        assert_relative_eq!(est.d2, slope, max_relative = 1e-10);
        assert!((est.d2 - 2.0).abs() <= 0.1, "D2 = {}", est.d2);
    }

    #[test]
    fn curve_csv() {
        let t = line(&[0.0, 1.0, 2.5]);
        let c = correlation_curve(&t, &[0.5, 1.5, 5.0]).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "r,log_r,C,log_C,in_fit_range");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with("false"));
        assert!(lines[2].ends_with("true"));
        assert!(lines[3].ends_with("false"));
    }

    proptest! {
        #[test]
        fn curve_matches_naive_and_is_monotone(
            pts in proptest::collection::vec(proptest::collection::vec(-3.0..3.0f64, 2), 2..60),
            mut radii in proptest::collection::vec(0.01..6.0f64, 1..12),
        ) {
            radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
            radii.dedup();
            let t = Trajectory::from_points(&pts, NormKind::L2).unwrap();
            let c = correlation_curve(&t, &radii).unwrap();
            for (k, &r) in radii.iter().enumerate() {
                prop_assert_eq!(c.sums[k], naive_sum(&t, r));
            }
            prop_assert!(c.sums.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn slope_is_scale_invariant(k in 0.1..10.0f64, seed in 0u64..1000) {
            let mut rng = seeded_rng(seed);
            let rows: Vec<Vec<f64>> = (0..150).map(|_| vec![rng.random(), rng.random()]).collect();
            let t = Trajectory::from_points(&rows, NormKind::L1).unwrap();
            let grid = geometric_grid(0.05, 0.5, 10).unwrap();
            let scaled_grid: Vec<f64> = grid.iter().map(|r| r * k).collect();
            let a = gp_dimension(&correlation_curve(&t, &grid).unwrap(), None).unwrap();
            let b = gp_dimension(&correlation_curve(&t.scaled(k), &scaled_grid).unwrap(), None).unwrap();
            prop_assert!((a.d2 - b.d2).abs() < 1e-9);
        }
    }
}
