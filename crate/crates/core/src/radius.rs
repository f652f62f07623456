//! Reference-rule radius for correlation-sum estimators.
//!
//! The correlation sum `C(r, n)` is the mean of a uniform-kernel density
//! estimator with bandwidth `r`. Minimizing that estimator's asymptotic mean
//! integrated squared error against a Gaussian reference density gives
//!
//! ```text
//! r_opt = alpha(p, d) * s * n^(-1/(d+4))
//! ```
//!
//! where `s = min(sigma, IQR / 1.34)` is a robust spread of the data and `n`
//! the number of phase-space points. The fit range for scaling exponents is
//! then `[beta * r_opt, r_opt]` for some `0 < beta < 1`.

use std::io::{self, Write};

use crate::error::{invalid, Error, Result};
use crate::norm::{unit_ball_volume, unit_ball_volume_gamma, NormKind};
use crate::pairs::{max_pairwise_distance, pairwise_distances};
use crate::scalar::{count, lit, ln_factorial, ln_gamma, Real};
use crate::series::{TimeSeries, Trajectory};
use crate::stats::{iqr, quantile_sorted, sample_variance, sort_reals};

/// Ratio between the IQR and the standard deviation of a normal distribution,
/// rounded as in the usual robust spread estimator.
pub const IQR_TO_SIGMA: f64 = 1.34;

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(invalid("dimension must be at least 1"))
    } else {
        Ok(())
    }
}

/// `alpha(p, 1) = (12 sqrt(pi))^(1/5)`, identical for every norm.
fn alpha_one_dim<T: Real>() -> T {
    (count::<T>(12) * T::PI().sqrt()).powf(lit(0.2))
}

/// Coefficient of the reference rule, from the closed forms per norm.
pub fn alpha_coefficient<T: Real>(norm: NormKind, d: usize) -> Result<T> {
    check_dim(d)?;
    if d == 1 {
        return Ok(alpha_one_dim());
    }
    let d_t = count::<T>(d);
    let inv = T::one() / (d_t + count::<T>(4));
    let half_d_ln_pi = d_t / count::<T>(2) * T::PI().ln();
    let ln = match norm {
        // ((d+2)! (d+1) pi^(d/2))^(1/(d+4))
        NormKind::L1 => ln_factorial::<T>(d + 2) + (d_t + T::one()).ln() + half_d_ln_pi,
        // 2 (Gamma(d/2 + 2) / 2)^(1/(d+4))
        NormKind::L2 => {
            let g = ln_gamma(d_t / count::<T>(2) + count::<T>(2)) - count::<T>(2).ln();
            return Ok(count::<T>(2) * (g * inv).exp());
        }
        // (36 pi^(d/2) / (d+2))^(1/(d+4))
        NormKind::Linf => count::<T>(36).ln() + half_d_ln_pi - (d_t + count::<T>(2)).ln(),
    };
    Ok((ln * inv).exp())
}

/// Coefficient of the reference rule from the general Gamma-function
/// expression, valid for any `p` (`1/p = 0` for the max norm).
pub fn alpha_general<T: Real>(norm: NormKind, d: usize) -> Result<T> {
    if d < 2 {
        return Err(invalid(format!("general coefficient form needs d >= 2, got {d}")));
    }
    let q: T = norm.inverse_exponent();
    let one = T::one();
    let d_t = count::<T>(d);
    let two = count::<T>(2);
    let three = count::<T>(3);
    let tau: T = unit_ball_volume_gamma(norm, d);
    // 4 (2 sqrt(pi))^d (3 G((d+2)/p+1) G(1/p+1))^2
    //   / (tau (d+2) (G(d/p+1) G(1+3/p))^2)
    let ln_num = count::<T>(4).ln()
        + d_t * (two * T::PI().sqrt()).ln()
        + two * (three.ln() + ln_gamma((d_t + two) * q + one) + ln_gamma(q + one));
    let ln_den = tau.ln() + (d_t + two).ln() + two * (ln_gamma(d_t * q + one) + ln_gamma(one + three * q));
    Ok(((ln_num - ln_den) / (d_t + count::<T>(4))).exp())
}

/// Data whose columns (marginals) can be inspected for spread estimation.
pub trait Marginals<T: Real> {
    fn marginal_count(&self) -> usize;
    fn marginal(&self, k: usize) -> Vec<T>;
}

impl<T: Real> Marginals<T> for TimeSeries<T> {
    fn marginal_count(&self) -> usize {
        1
    }

    fn marginal(&self, _k: usize) -> Vec<T> {
        self.values().to_vec()
    }
}

impl<T: Real> Marginals<T> for Trajectory<T> {
    fn marginal_count(&self) -> usize {
        self.dim()
    }

    fn marginal(&self, k: usize) -> Vec<T> {
        self.column(k).collect()
    }
}

impl<T: Real> Marginals<T> for [T] {
    fn marginal_count(&self) -> usize {
        1
    }

    fn marginal(&self, _k: usize) -> Vec<T> {
        self.to_vec()
    }
}

/// The two spread statistics and their minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread<T: Real> {
    /// `sqrt(mean of marginal sample variances)`.
    pub sigma: T,
    /// Mean of marginal interquartile ranges.
    pub iqr: T,
    /// `min(sigma, iqr / 1.34)`.
    pub spread: T,
}

/// Mean marginal sample variance and mean marginal IQR.
fn marginal_moments<T: Real, D: Marginals<T> + ?Sized>(data: &D) -> Result<(T, T)> {
    let d = data.marginal_count();
    let mut var_sum = T::zero();
    let mut iqr_sum = T::zero();
    for k in 0..d {
        let col = data.marginal(k);
        if col.len() < 2 {
            return Err(Error::SeriesTooShort {
                required: 2,
                actual: col.len(),
            });
        }
        var_sum = var_sum + sample_variance(&col);
        iqr_sum = iqr_sum + iqr(&col);
    }
    Ok((var_sum / count::<T>(d), iqr_sum / count::<T>(d)))
}

/// `sqrt(d^-1 trace(S))`, the average marginal sample standard deviation.
pub fn marginal_sigma<T: Real, D: Marginals<T> + ?Sized>(data: &D) -> Result<T> {
    marginal_moments(data).map(|(v, _)| v.sqrt())
}

/// Robust spread of the data, reported with its components.
pub fn spread_components<T: Real, D: Marginals<T> + ?Sized>(data: &D) -> Result<Spread<T>> {
    let (var, iqr_mean) = marginal_moments(data)?;
    let sigma = var.sqrt();
    let robust = iqr_mean / lit(IQR_TO_SIGMA);
    let spread = if robust < sigma { robust } else { sigma };
    if !(spread > T::zero()) {
        return Err(Error::Degenerate("input has zero spread".into()));
    }
    Ok(Spread {
        sigma,
        iqr: iqr_mean,
        spread,
    })
}

/// `min(sigma, IQR / 1.34)` over the marginals of the data.
pub fn spread_estimate<T: Real, D: Marginals<T> + ?Sized>(data: &D) -> Result<T> {
    spread_components(data).map(|s| s.spread)
}

/// A reference-rule radius and the quantities it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSelection<T: Real> {
    pub r_opt: T,
    pub alpha: T,
    pub spread: T,
    pub n: usize,
    pub d: usize,
    pub norm: NormKind,
}

impl<T: Real> RadiusSelection<T> {
    /// Reference radius for a trajectory, with spread taken over its marginals.
    pub fn for_trajectory(traj: &Trajectory<T>) -> Result<Self> {
        let s = spread_estimate(traj)?;
        reference_radius(s, traj.len(), traj.dim(), traj.norm())
    }

    /// Reference radius for a scalar series treated as one-dimensional points.
    pub fn for_series(series: &TimeSeries<T>) -> Result<Self> {
        let s = spread_estimate(series)?;
        reference_radius(s, series.len(), 1, NormKind::Linf)
    }

    pub fn range(&self, beta: T) -> Result<RadiusRange<T>> {
        radius_range(self, beta)
    }
}

/// `r_opt = alpha(p, d) * spread * n^(-1/(d+4))`.
pub fn reference_radius<T: Real>(spread: T, n: usize, d: usize, norm: NormKind) -> Result<RadiusSelection<T>> {
    if !(spread > T::zero()) || !spread.is_finite() {
        return Err(invalid(format!("spread must be positive, got {spread}")));
    }
    if n < 2 {
        return Err(invalid(format!("trajectory length must be at least 2, got {n}")));
    }
    let alpha: T = alpha_coefficient(norm, d)?;
    let r_opt = alpha * spread * count::<T>(n).powf(-T::one() / count::<T>(d + 4));
    Ok(RadiusSelection {
        r_opt,
        alpha,
        spread,
        n,
        d,
        norm,
    })
}

/// Radius interval `[beta * r_opt, r_opt]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusRange<T: Real> {
    pub lower: T,
    pub upper: T,
    pub beta: T,
}

impl<T: Real> RadiusRange<T> {
    /// Inclusive membership, tolerant to one ulp-scale rounding at the ends.
    pub fn contains(&self, r: T) -> bool {
        let slack = lit::<T>(1e-12);
        r >= self.lower * (T::one() - slack) && r <= self.upper * (T::one() + slack)
    }
}

pub fn radius_range<T: Real>(selection: &RadiusSelection<T>, beta: T) -> Result<RadiusRange<T>> {
    if !(beta > T::zero() && beta < T::one()) {
        return Err(invalid(format!("beta must lie in (0, 1), got {beta}")));
    }
    Ok(RadiusRange {
        lower: beta * selection.r_opt,
        upper: selection.r_opt,
        beta,
    })
}

/// Radius rules used in the literature before the reference rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineRule<T: Real> {
    /// `c * sigma`.
    FractionOfSigma(T),
    /// `c * (largest pairwise distance)`.
    FractionOfMaxExtent(T),
    /// Radius at which a fraction `q` of the point pairs are neighbors.
    FixedRecurrenceRate(T),
}

/// Radius from one of the [`BaselineRule`]s.
///
/// The recurrence-rate rule takes the `q`-quantile of all `n (n - 1) / 2`
/// distinct-pair distances and therefore holds them all in memory.
pub fn baseline_radius<T: Real>(traj: &Trajectory<T>, rule: BaselineRule<T>) -> Result<T> {
    let degenerate = || Error::Degenerate("all trajectory points coincide".into());
    match rule {
        BaselineRule::FractionOfSigma(c) => {
            if !(c > T::zero()) {
                return Err(invalid(format!("fraction must be positive, got {c}")));
            }
            let sigma = marginal_sigma(traj)?;
            if !(sigma > T::zero()) {
                return Err(degenerate());
            }
            Ok(c * sigma)
        }
        BaselineRule::FractionOfMaxExtent(c) => {
            if !(c > T::zero()) {
                return Err(invalid(format!("fraction must be positive, got {c}")));
            }
            let max = max_pairwise_distance(traj);
            if !(max > T::zero()) {
                return Err(degenerate());
            }
            Ok(c * max)
        }
        BaselineRule::FixedRecurrenceRate(q) => {
            if !(q > T::zero() && q < T::one()) {
                return Err(invalid(format!("recurrence rate must lie in (0, 1), got {q}")));
            }
            let mut dists = pairwise_distances(traj);
            sort_reals(&mut dists);
            if !(dists.last().copied().unwrap_or_else(T::zero) > T::zero()) {
                return Err(degenerate());
            }
            let r = quantile_sorted(&dists, q);
            if r > T::zero() {
                Ok(r)
            } else {
                Err(Error::Degenerate(format!(
                    "more than a fraction {q} of pairs are at distance zero"
                )))
            }
        }
    }
}

/// `W1(K) = integral of K^2` for the uniform kernel on the unit `L_p` ball.
pub fn kernel_w1<T: Real>(norm: NormKind, d: usize) -> Result<T> {
    Ok(T::one() / unit_ball_volume::<T>(norm, d)?)
}

/// `W2(K) = integral of u_1^2 K(u)` for the uniform kernel on the unit
/// `L_p` ball.
pub fn kernel_w2<T: Real>(norm: NormKind, d: usize) -> Result<T> {
    check_dim(d)?;
    let q: T = norm.inverse_exponent();
    let one = T::one();
    let d_t = count::<T>(d);
    let ln = ln_gamma(d_t * q + one) + ln_gamma(one + count::<T>(3) * q)
        - ln_gamma((d_t + count::<T>(2)) * q + one)
        - ln_gamma(q + one);
    Ok(ln.exp() / count::<T>(3))
}

/// Radius- and length-dependent factors of the pointwise bias and variance
/// of the uniform-kernel estimator.
///
/// `bias = (r^2 / 2) W2(K)` and `variance = W1(K) / (n r^d)`. The density
/// factors (the Laplacian of the density for the bias, the density itself
/// for the variance) are left to the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmiseScales<T: Real> {
    pub bias: T,
    pub variance: T,
}

pub fn amise_bias_variance<T: Real>(r: T, n: usize, d: usize, norm: NormKind) -> Result<AmiseScales<T>> {
    if !(r > T::zero()) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    if n == 0 {
        return Err(invalid("length must be positive"));
    }
    let w1: T = kernel_w1(norm, d)?;
    let w2: T = kernel_w2(norm, d)?;
    Ok(AmiseScales {
        bias: r * r / count::<T>(2) * w2,
        variance: w1 / (count::<T>(n) * r.powi(d as i32)),
    })
}

/// Rows `(norm, d, alpha)` for `d = 1..=max_d` and every supported norm.
pub fn coefficient_table(max_d: usize) -> Vec<(NormKind, usize, f64)> {
    NormKind::ALL
        .iter()
        .flat_map(|&norm| (1..=max_d).map(move |d| (norm, d, alpha_coefficient::<f64>(norm, d).expect("d >= 1"))))
        .collect()
}

/// Writes the coefficient table as CSV with columns `p,d,alpha`.
pub fn write_coefficient_csv<W: Write>(mut out: W, max_d: usize) -> io::Result<()> {
    writeln!(out, "p,d,alpha")?;
    for (norm, d, alpha) in coefficient_table(max_d) {
        writeln!(out, "{},{},{:.6}", norm.label(), d, alpha)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Published rounded coefficients, rows d = 1..5, columns L1, L2, Linf.
    const TABLE: [[f64; 3]; 5] = [
        [1.843, 1.843, 1.843],
        [2.468, 2.000, 1.745],
        [3.087, 2.150, 1.694],
        [3.705, 2.294, 1.666],
        [4.325, 2.432, 1.649],
    ];

    #[test]
    fn coefficients_match_published_table() {
        for (row, d) in TABLE.iter().zip(1..) {
            for (&expected, norm) in row.iter().zip(NormKind::ALL) {
                let a: f64 = alpha_coefficient(norm, d).unwrap();
                assert!((a - expected).abs() <= 5e-4, "{norm} d={d}: {a} vs {expected}");
            }
        }
    }

    #[test]
    fn coefficient_special_values() {
        let a: f64 = alpha_coefficient(NormKind::L2, 2).unwrap();
        assert_relative_eq!(a, 2.0, max_relative = 1e-14);
        let a1: f64 = alpha_coefficient(NormKind::L1, 1).unwrap();
        assert_relative_eq!(a1, 1.843_1, epsilon = 1e-4);
        assert!(alpha_coefficient::<f64>(NormKind::L1, 0).is_err());
    }

    #[test]
    fn general_form_matches_closed_forms() {
        for norm in NormKind::ALL {
            for d in 2..=10 {
                let a: f64 = alpha_coefficient(norm, d).unwrap();
                let g: f64 = alpha_general(norm, d).unwrap();
                assert_relative_eq!(a, g, max_relative = 1e-10);
            }
        }
        let g: f64 = alpha_general(NormKind::Linf, 4).unwrap();
        assert!((g - 1.666).abs() <= 5e-4);
        let g: f64 = alpha_general(NormKind::L1, 2).unwrap();
        assert!((g - 2.468).abs() <= 5e-4);
        let g: f64 = alpha_general(NormKind::L2, 5).unwrap();
        assert!((g - 2.432).abs() <= 5e-4);
        assert!(alpha_general::<f64>(NormKind::L2, 1).is_err());
    }

    #[test]
    fn coefficient_in_f32() {
        let a: f32 = alpha_coefficient(NormKind::L2, 3).unwrap();
        assert!((a - 2.150).abs() <= 5e-4);
    }

    #[test]
    fn spread_examples() {
        let s = spread_components(&[1.0, 2.0, 3.0, 4.0, 5.0][..]).unwrap();
        assert_relative_eq!(s.sigma, 2.5f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(s.spread, 2.0 / 1.34, max_relative = 1e-14);
        assert!(matches!(
            spread_estimate(&[2.0, 2.0, 2.0][..]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn spread_of_embedding_tracks_series_std() {
        let series = TimeSeries::from_map((0..500).map(|i| (i as f64 * 0.1).sin()).collect()).unwrap();
        let traj =
            crate::embedding::delay_embed(&series, crate::embedding::EmbeddingSpec::new(3, 2), NormKind::L2).unwrap();
        let a = spread_components(&series).unwrap().sigma;
        let b = spread_components(&traj).unwrap().sigma;
        assert_relative_eq!(a, b, max_relative = 0.01);
    }

    #[test]
    fn reference_radius_examples() {
        let r = reference_radius(1.0, 1024, 1, NormKind::L2).unwrap();
        assert_relative_eq!(r.r_opt, alpha_one_dim::<f64>() / 4.0, max_relative = 1e-14);
        assert_relative_eq!(r.r_opt, 0.460_78, epsilon = 1e-5);
        let r2 = reference_radius(2.0, 1024, 1, NormKind::Linf).unwrap();
        assert_relative_eq!(r2.r_opt, 0.921_56, epsilon = 1e-5);
        let r3 = reference_radius(1.0, 4096, 2, NormKind::L2).unwrap();
        assert_relative_eq!(r3.r_opt, 0.5, max_relative = 1e-13);
        assert!(reference_radius(0.0, 10, 1, NormKind::L2).is_err());
        assert!(reference_radius(1.0, 1, 1, NormKind::L2).is_err());
        assert!(reference_radius(1.0, 10, 0, NormKind::L2).is_err());
    }

    #[test]
    fn range_examples() {
        let sel = RadiusSelection {
            r_opt: 0.5,
            alpha: 1.0,
            spread: 1.0,
            n: 10,
            d: 1,
            norm: NormKind::L2,
        };
        let r = radius_range(&sel, 0.1).unwrap();
        assert_relative_eq!(r.lower, 0.05, max_relative = 1e-15);
        assert_eq!(r.upper, 0.5);
        assert_eq!(radius_range(&sel, 0.5).unwrap().lower, 0.25);
        assert!(radius_range(&sel, 1.0).is_err());
        assert!(radius_range(&sel, 0.0).is_err());
    }

    #[test]
    fn baseline_examples() {
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let traj = Trajectory::from_points(&pts, NormKind::L2).unwrap();

        // brute-force quantile of all 45 cross distances
        let mut d: Vec<f64> = Vec::new();
        for i in 0..10 {
            for j in i + 1..10 {
                d.push((i as f64 - j as f64).abs());
            }
        }
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(d.len(), 45);
        let h = 44.0 * 0.1;
        let oracle = d[4] + (h - 4.0) * (d[5] - d[4]);
        assert_eq!(oracle, 1.0);
        assert_eq!(
            baseline_radius(&traj, BaselineRule::FixedRecurrenceRate(0.1)).unwrap(),
            oracle
        );

        let two = Trajectory::from_points(&[vec![0.0], vec![1.0]], NormKind::L2).unwrap();
        assert_relative_eq!(
            baseline_radius(&two, BaselineRule::FractionOfMaxExtent(0.1)).unwrap(),
            0.1,
            max_relative = 1e-15
        );

        // {-2, 2, -2, 2}: sample variance 16/3
        let s = Trajectory::from_points(&[vec![-2.0], vec![2.0], vec![-2.0], vec![2.0]], NormKind::L2).unwrap();
        let sigma = (16.0f64 / 3.0).sqrt();
        let got = baseline_radius(&s, BaselineRule::FractionOfSigma(0.2)).unwrap();
        assert_relative_eq!(got, 0.2 * sigma, max_relative = 1e-14);

        let flat = Trajectory::from_points(&[vec![1.0], vec![1.0], vec![1.0]], NormKind::L2).unwrap();
        for rule in [
            BaselineRule::FractionOfSigma(0.2),
            BaselineRule::FractionOfMaxExtent(0.1),
            BaselineRule::FixedRecurrenceRate(0.1),
        ] {
            assert!(matches!(baseline_radius(&flat, rule), Err(Error::Degenerate(_))));
        }
    }

    #[test]
    fn fraction_of_sigma_on_unit_std() {
        // {-1, 1} has sample variance 2; scale so std is exactly 2
        let k = 2.0 / 2f64.sqrt();
        let s = Trajectory::from_points(&[vec![-k], vec![k]], NormKind::L2).unwrap();
        let got = baseline_radius(&s, BaselineRule::FractionOfSigma(0.2)).unwrap();
        assert_relative_eq!(got, 0.4, max_relative = 1e-14);
    }

    #[test]
    fn kernel_functionals() {
        let w2: f64 = kernel_w2(NormKind::L2, 1).unwrap();
        assert_relative_eq!(w2, 1.0 / 3.0, max_relative = 1e-14);
        for norm in NormKind::ALL {
            let w2: f64 = kernel_w2(norm, 1).unwrap();
            assert_relative_eq!(w2, 1.0 / 3.0, max_relative = 1e-13);
            for d in 1..=8 {
                let w1: f64 = kernel_w1(norm, d).unwrap();
                let tau: f64 = unit_ball_volume(norm, d).unwrap();
                assert_relative_eq!(w1 * tau, 1.0, max_relative = 1e-14);
            }
        }
        // the cube [-1,1]^d has E[u1^2] = 1/3 in every dimension
        let w2: f64 = kernel_w2(NormKind::Linf, 5).unwrap();
        assert_relative_eq!(w2, 1.0 / 3.0, max_relative = 1e-13);
        // Euclidean ball: E[u1^2] = 1/(d+2)
        let w2: f64 = kernel_w2(NormKind::L2, 4).unwrap();
        assert_relative_eq!(w2, 1.0 / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn bias_variance_examples() {
        let s = amise_bias_variance(0.3, 100, 1, NormKind::L2).unwrap();
        assert_relative_eq!(s.bias, 0.09 / 6.0, max_relative = 1e-14);
        let s = amise_bias_variance(0.5, 10, 3, NormKind::Linf).unwrap();
        assert_relative_eq!(s.variance, 1.0 / (8.0 * 10.0 * 0.125), max_relative = 1e-14);
        let a = amise_bias_variance(0.5, 100, 2, NormKind::L1).unwrap();
        let b = amise_bias_variance(0.5, 200, 2, NormKind::L1).unwrap();
        assert_eq!(a.bias, b.bias);
        assert_relative_eq!(a.variance, 2.0 * b.variance, max_relative = 1e-14);
        assert!(amise_bias_variance(0.0, 10, 1, NormKind::L2).is_err());
    }

    #[test]
    fn bias_variance_tradeoff_has_single_interior_minimum() {
        for norm in NormKind::ALL {
            for d in 1..=4 {
                let (wb, wv) = (0.7, 1.3);
                let radii: Vec<f64> = (0..400).map(|k| 10f64.powf(-3.0 + 4.0 * k as f64 / 399.0)).collect();
                let loss: Vec<f64> = radii
                    .iter()
                    .map(|&r| {
                        let s = amise_bias_variance(r, 500, d, norm).unwrap();
                        wb * s.bias * s.bias + wv * s.variance
                    })
                    .collect();
                let argmin = loss
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .unwrap()
                    .0;
                assert!(argmin > 0 && argmin < radii.len() - 1);
                assert!(loss[..argmin].windows(2).all(|w| w[0] > w[1]));
                assert!(loss[argmin..].windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn coefficient_csv_layout() {
        let mut buf = Vec::new();
        write_coefficient_csv(&mut buf, 5).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "p,d,alpha");
        assert_eq!(lines.len(), 16);
        assert!(lines.contains(&"2,2,2.000000"));
    }

    proptest! {
        #[test]
        fn reference_radius_is_scale_equivariant(
            xs in proptest::collection::vec(-10.0..10.0f64, 5..60),
            k in 0.01..100.0f64,
        ) {
            if let Ok(s) = spread_estimate(&xs[..]) {
                let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
                let sk = spread_estimate(&scaled[..]).unwrap();
                let a = reference_radius(s, xs.len(), 1, NormKind::L2).unwrap().r_opt;
                let b = reference_radius(sk, xs.len(), 1, NormKind::L2).unwrap().r_opt;
                prop_assert!((b - k * a).abs() <= 1e-9 * b.abs().max(1.0));
            }
        }

        #[test]
        fn reference_radius_decreases_with_length(n in 2usize..100_000, d in 1usize..8) {
            let a = reference_radius(1.0, n, d, NormKind::L1).unwrap().r_opt;
            let b = reference_radius(1.0, n + 1, d, NormKind::L1).unwrap().r_opt;
            prop_assert!(b < a);
        }
    }
}
