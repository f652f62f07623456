//! `L_p` norms for p in {1, 2, inf} and the volumes of their unit balls.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::scalar::{count, ln_factorial, ln_gamma, Real};

/// The norms supported by the closed-form radius coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NormKind {
    L1,
    #[default]
    L2,
    Linf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::Linf];

    /// `1/p`, with `0` standing in for the `p -> inf` limit.
    pub fn inverse_exponent<T: Real>(self) -> T {
        match self {
            NormKind::L1 => T::one(),
            NormKind::L2 => crate::scalar::lit(0.5),
            NormKind::Linf => T::zero(),
        }
    }

    /// Label used in CSV output: `1`, `2` or `inf`.
    pub fn label(self) -> &'static str {
        match self {
            NormKind::L1 => "1",
            NormKind::L2 => "2",
            NormKind::Linf => "inf",
        }
    }

    /// `||a - b||_p` for slices of equal length (unchecked).
    #[inline]
    pub fn dist<T: Real>(self, a: &[T], b: &[T]) -> T {
        debug_assert_eq!(a.len(), b.len());
        let diffs = a.iter().zip(b).map(|(&x, &y)| (x - y).abs());
        match self {
            NormKind::L1 => diffs.fold(T::zero(), |s, v| s + v),
            NormKind::L2 => diffs.fold(T::zero(), |s, v| s + v * v).sqrt(),
            NormKind::Linf => diffs.fold(T::zero(), |m, v| if v > m { v } else { m }),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::Linf => "linf",
        };
        f.write_str(s)
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "l1" | "manhattan" => Ok(NormKind::L1),
            "2" | "l2" | "euclidean" => Ok(NormKind::L2),
            "inf" | "linf" | "max" | "chebyshev" => Ok(NormKind::Linf),
            other => Err(invalid(format!("unsupported norm '{other}' (expected l1, l2 or linf)"))),
        }
    }
}

/// Distance between two points under `norm`.
pub fn distance<T: Real>(a: &[T], b: &[T], norm: NormKind) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(norm.dist(a, b))
}

/// Volume of the unit ball of `norm` in `d` dimensions.
pub fn unit_ball_volume<T: Real>(norm: NormKind, d: usize) -> Result<T> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let two_d = count::<T>(2).powi(d as i32);
    Ok(match norm {
        NormKind::L1 => (two_d.ln() - ln_factorial::<T>(d)).exp(),
        NormKind::L2 => {
            let half_d = count::<T>(d) / count::<T>(2);
            (half_d * T::PI().ln() - ln_gamma(half_d + T::one())).exp()
        }
        NormKind::Linf => two_d,
    })
}

/// Unit-ball volume from the general Gamma form, valid for any `p >= 1`.
pub(crate) fn unit_ball_volume_gamma<T: Real>(norm: NormKind, d: usize) -> T {
    let q: T = norm.inverse_exponent();
    let d_t = count::<T>(d);
    let ln = d_t * (count::<T>(2).ln() + ln_gamma(q + T::one())) - ln_gamma(d_t * q + T::one());
    ln.exp()
}
