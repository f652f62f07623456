//! Radius selection for correlation-sum based nonlinear measures.
//!
//! The neighborhood radius `r` of a correlation sum plays the role of the
//! bandwidth of a uniform-kernel density estimator, and the usual AMISE
//! reference rule for that bandwidth gives a closed-form default radius
//! ([`radius::reference_radius`]) and a fit range `[beta r_opt, r_opt]`.
//! On top of it the crate provides Grassberger-Procaccia correlation
//! dimension ([`correlation`]), recurrence plots and K2 entropy from
//! diagonal-line histograms ([`recurrence`]), delay embedding
//! ([`embedding`]), benchmark systems ([`systems`]) and the statistics used
//! to compare estimators ([`stats`]).
//!
//! The numerical code is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar type.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlation;
pub mod embedding;
pub mod error;
pub mod norm;
mod pairs;
pub mod radius;
pub mod recurrence;
pub mod rng;
pub mod scalar;
pub mod series;
pub mod stats;
pub mod systems;

pub use correlation::{
    correlation_curve, correlation_sum, geometric_grid, gp_dimension, CorrelationCurve, DimensionEstimate, SelfPairs,
};
pub use embedding::{delay_embed, select_delay_mi, DelaySelection, EmbeddingSpec};
pub use error::{Error, Result};
pub use norm::{distance, unit_ball_volume, NormKind};
pub use radius::{
    alpha_coefficient, alpha_general, amise_bias_variance, baseline_radius, radius_range, reference_radius,
    spread_estimate, AmiseScales, BaselineRule, RadiusRange, RadiusSelection,
};
pub use recurrence::{
    diagonal_histogram, k2_curve, k2_estimate, recurrence_matrix, DiagonalHistogram, EntropyEstimate, K2Point,
    K2Settings, RecurrenceMatrix,
};
pub use scalar::Real;
pub use series::{TimeSeries, Trajectory};
pub use stats::{bootstrap_ci, gaussian_ci, mse_curve, two_sample_z, SampleSummary};

pub type Series = TimeSeries<f64>;
pub type Series32 = TimeSeries<f32>;
pub type Traj = Trajectory<f64>;
pub type Traj32 = Trajectory<f32>;
pub type Selection = RadiusSelection<f64>;
pub type Range = RadiusRange<f64>;
pub type Curve = CorrelationCurve<f64>;
pub type Dimension = DimensionEstimate<f64>;
pub type Recurrence = RecurrenceMatrix<f64>;
pub type Histogram = DiagonalHistogram<f64>;
pub type Entropy = EntropyEstimate<f64>;
pub type Summary = SampleSummary<f64>;
