//! Brute-force pair scans over a trajectory, parallel over rows.
//!
//! Every reduction here is over integers or exact maxima, so the result does
//! not depend on how rayon splits the rows.

use rayon::prelude::*;

use crate::scalar::Real;
use crate::series::Trajectory;

/// All distances `d(x_i, x_j)` for `i < j`, in row-major pair order.
pub fn pairwise_distances<T: Real>(traj: &Trajectory<T>) -> Vec<T> {
    let n = traj.len();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| (i + 1..n).map(move |j| traj.dist(i, j)))
        .collect()
}

/// Largest distance between any two points.
pub fn max_pairwise_distance<T: Real>(traj: &Trajectory<T>) -> T {
    let n = traj.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| traj.dist(i, j))
                .fold(T::zero(), |m, v| if v > m { v } else { m })
        })
        .reduce(T::zero, |a, b| if b > a { b } else { a })
}

/// For each radius in the sorted grid, the number of unordered pairs
/// `i < j` with `d(x_i, x_j) < r`.
///
/// Each distance is located once in the grid by binary search, then a prefix
/// sum turns the per-interval histogram into cumulative counts.
pub fn pair_counts_below<T: Real>(traj: &Trajectory<T>, sorted_radii: &[T]) -> Vec<u64> {
    let n = traj.len();
    let bins = sorted_radii.len();
    let hist = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; bins + 1],
            |mut h, i| {
                for j in i + 1..n {
                    let d = traj.dist(i, j);
                    // first grid index whose radius strictly exceeds d
                    let k = sorted_radii.partition_point(|&r| r <= d);
                    h[k] += 1;
                }
                h
            },
        )
        .reduce(
            || vec![0u64; bins + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut acc = 0u64;
    hist[..bins]
        .iter()
        .map(|&c| {
            acc += c;
            acc
        })
        .collect()
}
