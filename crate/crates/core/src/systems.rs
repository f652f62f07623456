//! Benchmark dynamical systems and observational noise.
//!
//! Flows are integrated with an adaptive Dormand-Prince 5(4) scheme and
//! sampled at a fixed step through its continuous extension; maps are
//! iterated exactly. Integration runs in `f64`; use [`TimeSeries::cast`] for
//! other scalar types.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::rng::{derive_seed, seeded_rng};
use crate::series::TimeSeries;
use crate::stats::sample_std;

/// Relative tolerance of the flow integrator.
pub const RTOL: f64 = 1e-9;
/// Absolute tolerance of the flow integrator.
pub const ATOL: f64 = 1e-12;
/// State norm treated as divergence.
pub const DIVERGENCE_NORM: f64 = 1e6;

/// Default transient (discarded samples) for flows.
pub const FLOW_TRANSIENT: usize = 1000;
/// Default transient (discarded iterations) for maps.
pub const MAP_TRANSIENT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemKind {
    Lorenz { sigma: f64, beta: f64, rho: f64, dt: f64 },
    Rossler { a: f64, b: f64, c: f64, dt: f64 },
    Henon { a: f64, b: f64 },
}

impl SystemKind {
    pub fn lorenz() -> Self {
        SystemKind::Lorenz {
            sigma: 10.0,
            beta: 8.0 / 3.0,
            rho: 28.0,
            dt: 0.01,
        }
    }

    pub fn rossler() -> Self {
        SystemKind::Rossler {
            a: 0.1,
            b: 0.1,
            c: 14.0,
            dt: 0.05,
        }
    }

    pub fn henon() -> Self {
        SystemKind::Henon { a: 1.4, b: 0.3 }
    }

    /// System by name (`lorenz`, `rossler`, `henon`) with standard parameters.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "lorenz" => Ok(Self::lorenz()),
            "rossler" | "roessler" => Ok(Self::rossler()),
            "henon" => Ok(Self::henon()),
            other => Err(invalid(format!("unknown system '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::Lorenz { .. } => "lorenz",
            SystemKind::Rossler { .. } => "rossler",
            SystemKind::Henon { .. } => "henon",
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            SystemKind::Henon { .. } => 2,
            _ => 3,
        }
    }

    /// Sampling step (`1` for maps).
    pub fn dt(&self) -> f64 {
        match *self {
            SystemKind::Lorenz { dt, .. } | SystemKind::Rossler { dt, .. } => dt,
            SystemKind::Henon { .. } => 1.0,
        }
    }

    pub fn is_map(&self) -> bool {
        matches!(self, SystemKind::Henon { .. })
    }

    pub fn default_transient(&self) -> usize {
        if self.is_map() {
            MAP_TRANSIENT
        } else {
            FLOW_TRANSIENT
        }
    }

    /// Box the random initial state is drawn from, per coordinate.
    ///
    /// Lorenz: `[-10, 10]^2 x [10, 30]` (the cube shifted up in `z`, away
    /// from the origin equilibrium); Rossler: `[-5, 5]^3`; Henon:
    /// `[-0.1, 0.1]^2`.
    pub fn initial_box(&self) -> Vec<(f64, f64)> {
        match self {
            SystemKind::Lorenz { .. } => vec![(-10.0, 10.0), (-10.0, 10.0), (10.0, 30.0)],
            SystemKind::Rossler { .. } => vec![(-5.0, 5.0); 3],
            SystemKind::Henon { .. } => vec![(-0.1, 0.1); 2],
        }
    }

    fn vector_field(&self, y: &[f64; 3]) -> [f64; 3] {
        match *self {
            SystemKind::Lorenz { sigma, beta, rho, .. } => [
                sigma * (y[1] - y[0]),
                y[0] * (rho - y[2]) - y[1],
                y[0] * y[1] - beta * y[2],
            ],
            SystemKind::Rossler { a, b, c, .. } => [-y[1] - y[2], y[0] + a * y[1], b + y[2] * (y[0] - c)],
            SystemKind::Henon { .. } => unreachable!("maps have no vector field"),
        }
    }
}

/// What to generate.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub seed: u64,
    pub transient: usize,
    pub length: usize,
    /// Overrides the random initial state.
    pub initial: Option<Vec<f64>>,
}

impl SystemSpec {
    pub fn new(kind: SystemKind, length: usize, seed: u64) -> Self {
        Self {
            kind,
            seed,
            transient: kind.default_transient(),
            length,
            initial: None,
        }
    }
}

/// Generated output: the `x` series and every state component.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub series: TimeSeries<f64>,
    /// `states[i]` is the full state at sample `i`.
    pub states: Vec<Vec<f64>>,
}

impl Generated {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = self.series.dt();
        (0..self.states.len()).map(move |i| i as f64 * dt)
    }
}

/// Runs the system and returns `length` samples after dropping `transient`.
///
/// Sample `0` of the full run is the initial state.
pub fn generate(spec: &SystemSpec) -> Result<Generated> {
    if spec.length < 2 {
        return Err(invalid(format!("length must be at least 2, got {}", spec.length)));
    }
    let dim = spec.kind.state_dim();
    let initial = match &spec.initial {
        Some(v) if v.len() != dim => {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: v.len(),
            })
        }
        Some(v) => v.clone(),
        None => {
            let mut rng = seeded_rng(spec.seed);
            spec.kind
                .initial_box()
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect()
        }
    };
    let total = spec.transient + spec.length;
    let states = match spec.kind {
        SystemKind::Henon { a, b } => iterate_henon(a, b, [initial[0], initial[1]], total)?,
        kind => {
            let y0 = [initial[0], initial[1], initial[2]];
            integrate(|y| kind.vector_field(y), y0, kind.dt(), total, RTOL, ATOL)?
                .into_iter()
                .map(|s| s.to_vec())
                .collect()
        }
    };
    let states: Vec<Vec<f64>> = states.into_iter().skip(spec.transient).collect();
    let xs = states.iter().map(|s| s[0]).collect();
    Ok(Generated {
        series: TimeSeries::new(xs, spec.kind.dt())?,
        states,
    })
}

fn iterate_henon(a: f64, b: f64, start: [f64; 2], total: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(total);
    let (mut x, mut y) = (start[0], start[1]);
    for k in 0..total {
        if !(x.hypot(y) <= DIVERGENCE_NORM) {
            return Err(Error::Divergence { t: k as f64 });
        }
        out.push(vec![x, y]);
        let nx = 1.0 - a * x * x + y;
        y = b * x;
        x = nx;
    }
    Ok(out)
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type V3 = [f64; 3];

#[inline]
fn axpy(y: &V3, terms: &[(f64, &V3)], h: f64) -> V3 {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(y)` from `y0` and returns `samples` states spaced `dt`
/// apart (the first one is `y0`).
pub fn integrate<F>(f: F, y0: V3, dt: f64, samples: usize, rtol: f64, atol: f64) -> Result<Vec<V3>>
where
    F: Fn(&V3) -> V3,
{
    if !(dt > 0.0) {
        return Err(invalid(format!("sampling step must be positive, got {dt}")));
    }
    let mut out = Vec::with_capacity(samples);
    if samples == 0 {
        return Ok(out);
    }
    out.push(y0);
    let t_end = (samples - 1) as f64 * dt;
    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = f(&y);
    let mut h = (dt * 0.1).min(0.01);
    let mut next = 1usize;

    while next < samples {
        if !(y.iter().map(|v| v * v).sum::<f64>().sqrt() <= DIVERGENCE_NORM) {
            return Err(Error::Divergence { t });
        }
        // never step further than the final sample
        let h_step = h.min(t_end - t + dt * 1e-9).max(1e-14);
        let k2 = f(&axpy(&y, &[(A21, &k1)], h_step));
        let k3 = f(&axpy(&y, &[(A31, &k1), (A32, &k2)], h_step));
        let k4 = f(&axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h_step));
        let k5 = f(&axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h_step));
        let k6 = f(&axpy(
            &y,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            h_step,
        ));
        let y1 = axpy(
            &y,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            h_step,
        );
        let k7 = f(&y1);

        let mut err = 0.0;
        for i in 0..3 {
            let e = h_step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = atol + rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / 3.0).sqrt();

        if err <= 1.0 {
            let t1 = t + h_step;
            // dense output for every sample time inside (t, t1]
            while next < samples {
                let ts = next as f64 * dt;
                if ts > t1 {
                    break;
                }
                let theta = (ts - t) / h_step;
                let mut ys = [0.0; 3];
                for i in 0..3 {
                    let r1 = y[i];
                    let r2 = y1[i] - y[i];
                    let r3 = h_step * k1[i] - r2;
                    let r4 = r2 - h_step * k7[i] - r3;
                    let r5 = h_step * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                    ys[i] = r1 + theta * (r2 + (1.0 - theta) * (r3 + theta * (r4 + (1.0 - theta) * r5)));
                }
                out.push(ys);
                next += 1;
            }
            t = t1;
            y = y1;
            k1 = k7;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = h_step * if err <= 1.0 { factor } else { factor.min(1.0) };
    }
    Ok(out)
}

/// Adds i.i.d. Gaussian noise with standard deviation `k` times the sample
/// standard deviation of the series.
pub fn add_observational_noise(series: &TimeSeries<f64>, k: f64, seed: u64) -> Result<TimeSeries<f64>> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(invalid(format!("noise level must be nonnegative, got {k}")));
    }
    if k == 0.0 {
        return Ok(series.clone());
    }
    let sd = k * sample_std(series.values());
    let mut rng = seeded_rng(derive_seed(seed, 0x006e_6f69_7365));
    let noisy = series
        .values()
        .iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            v + sd * z
        })
        .collect();
    TimeSeries::new(noisy, series.dt())
}
