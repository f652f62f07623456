//! Sampled signals and phase-space trajectories.

use crate::error::{invalid, Error, Result};
use crate::norm::NormKind;
use crate::scalar::{lit, Real};

/// A univariate signal sampled every `dt` time units.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T: Real> {
    values: Vec<T>,
    dt: T,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(values: Vec<T>, dt: T) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SeriesTooShort {
                required: 2,
                actual: values.len(),
            });
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(invalid(format!("sampling step must be positive, got {dt}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite sample at index {i}")));
        }
        Ok(Self { values, dt })
    }

    /// Series of a discrete map (`dt = 1`).
    pub fn from_map(values: Vec<T>) -> Result<Self> {
        Self::new(values, T::one())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Multiplies every sample by `k`.
    pub fn scaled(&self, k: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * k).collect(),
            dt: self.dt,
        }
    }

    /// Contiguous sub-series `[start, start + len)`.
    pub fn segment(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.len() {
            return Err(invalid(format!(
                "segment [{start}, {}) exceeds series length {}",
                start + len,
                self.len()
            )));
        }
        Self::new(self.values[start..start + len].to_vec(), self.dt)
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> TimeSeries<U> {
        TimeSeries {
            values: self
                .values
                .iter()
                .map(|v| lit::<U>(crate::scalar::to_f64(*v)))
                .collect(),
            dt: lit::<U>(crate::scalar::to_f64(self.dt)),
        }
    }
}

/// `n` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    coords: Vec<T>,
    n: usize,
    dim: usize,
    tau: usize,
    norm: NormKind,
}

impl<T: Real> Trajectory<T> {
    /// Builds a trajectory from a row-major coordinate buffer.
    pub fn from_flat(coords: Vec<T>, dim: usize, tau: usize, norm: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if tau == 0 {
            return Err(invalid("delay must be at least 1"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "{} coordinates do not form rows of length {dim}",
                coords.len()
            )));
        }
        let n = coords.len() / dim;
        if n < 2 {
            return Err(Error::SeriesTooShort { required: 2, actual: n });
        }
        if let Some(i) = coords.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite coordinate in point {}", i / dim)));
        }
        Ok(Self {
            coords,
            n,
            dim,
            tau,
            norm,
        })
    }

    /// Builds a native (non-embedded) trajectory from its points.
    pub fn from_points(points: &[Vec<T>], norm: NormKind) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.len(),
            });
        }
        Self::from_flat(points.concat(), dim, 1, norm)
    }

    /// One-dimensional trajectory holding the series samples as points.
    pub fn from_series(series: &TimeSeries<T>, norm: NormKind) -> Self {
        Self {
            coords: series.values().to_vec(),
            n: series.len(),
            dim: 1,
            tau: 1,
            norm,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.norm = norm;
        self
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Values of coordinate `k` across all points.
    pub fn column(&self, k: usize) -> impl Iterator<Item = T> + '_ {
        self.coords.iter().skip(k).step_by(self.dim).copied()
    }

    pub fn as_flat(&self) -> &[T] {
        &self.coords
    }

    /// Distance between points `i` and `j` under the trajectory's norm.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> T {
        self.norm.dist(self.point(i), self.point(j))
    }

    /// Multiplies every coordinate by `k`.
    pub fn scaled(&self, k: T) -> Self {
        Self {
            coords: self.coords.iter().map(|&v| v * k).collect(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_validation() {
        assert!(TimeSeries::new(vec![1.0], 1.0).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN], 1.0).is_err());
        assert!(TimeSeries::new(vec![1.0, 2.0], 0.0).is_err());
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0], 0.5).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dt(), 0.5);
        assert_eq!(s.segment(1, 2).unwrap().values(), &[2.0, 3.0]);
        assert!(s.segment(2, 2).is_err());
    }

    #[test]
    fn trajectory_layout() {
        let t = Trajectory::from_points(&[vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0]], NormKind::L1).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.dim(), 2);
        assert_eq!(t.point(1), &[2.0, 3.0]);
        assert_eq!(t.column(1).collect::<Vec<_>>(), vec![1.0, 3.0, 5.0]);
        assert_eq!(t.dist(0, 2), 8.0);
    }

    #[test]
    fn trajectory_rejects_ragged_rows() {
        let err = Trajectory::from_points(&[vec![0.0, 1.0], vec![2.0]], NormKind::L2).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        assert!(Trajectory::from_points(&[vec![0.0f64]], NormKind::L2).is_err());
    }

    #[test]
    fn cast_between_precisions() {
        let s = TimeSeries::new(vec![1.5f64, -2.25], 0.01).unwrap();
        let s32: TimeSeries<f32> = s.cast();
        assert_eq!(s32.values(), &[1.5f32, -2.25]);
    }
}
