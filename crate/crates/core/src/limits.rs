//! Limit detection on geometric sample grids.
//!
//! Every asymptotic quantity in this crate (angular limits along the
//! imaginary ray, orbit rate ratios, speed deviations) is sampled on a
//! geometric grid and fed through the same detector: optional one-step
//! Richardson extrapolation with a known error exponent, then a Cauchy test
//! on the tail window. Divergence to infinity and decay to zero get their
//! own verdicts so that callers never mistake either for convergence.

use num_complex::Complex64;
use serde::Serialize;

pub const DEFAULT_LIMIT_REL_TOL: f64 = 1e-6;
pub const DEFAULT_WINDOW: usize = 4;
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e3;
pub const DEFAULT_ZERO_FLOOR: f64 = 1e-3;

/// Estimated value of a limit: finite, or flagged infinite when the tail
/// grows without bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitValue {
    Finite(Complex64),
    Infinite,
}

impl LimitValue {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            LimitValue::Finite(v) => Some(v),
            LimitValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, LimitValue::Infinite)
    }
}

/// Outcome of a limit estimation.
///
/// `converged` implies `error_indicator` is at or below the tolerance the
/// detector ran with (`rel_tol`, or `zero_floor` for limits detected as 0).
/// A non-converged estimate with a finite value is undetermined, not wrong:
/// the tail simply has not settled.
#[derive(Clone, Debug)]
pub struct LimitEstimate {
    pub value: LimitValue,
    pub converged: bool,
    pub error_indicator: f64,
    pub grid_tail: Vec<(f64, Complex64)>,
}

impl LimitEstimate {
    pub fn undetermined(tail: Vec<(f64, Complex64)>) -> Self {
        let value = tail
            .last()
            .map(|&(_, v)| LimitValue::Finite(v))
            .unwrap_or(LimitValue::Finite(Complex64::new(0.0, 0.0)));
        Self {
            value,
            converged: false,
            error_indicator: f64::INFINITY,
            grid_tail: tail,
        }
    }

    pub fn is_divergent(&self) -> bool {
        self.value.is_infinite()
    }

    /// Converged to a value distinguishable from zero.
    pub fn converged_nonzero(&self, floor: f64) -> bool {
        self.converged && matches!(self.value, LimitValue::Finite(v) if v.norm() > floor)
    }
}

/// Detector options. `richardson` is the exponent `p` of the leading error
/// term `f(x) = L + c x^{-p}`; one extrapolation step removes it exactly on
/// a geometric grid. `zero_floor` bounds the decay-to-zero verdict, while
/// `scale_floor` keeps the Cauchy test meaningful near zero; they coincide
/// by default but quantities with a natural O(1) scale (hyperbolic
/// distances) raise `scale_floor` and disable the zero verdict.
#[derive(Clone, Copy, Debug)]
pub struct LimitOptions {
    pub rel_tol: f64,
    pub window: usize,
    pub richardson: Option<f64>,
    pub divergence_threshold: f64,
    pub zero_floor: f64,
    pub scale_floor: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_LIMIT_REL_TOL,
            window: DEFAULT_WINDOW,
            richardson: None,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            zero_floor: DEFAULT_ZERO_FLOOR,
            scale_floor: DEFAULT_ZERO_FLOOR,
        }
    }
}

impl LimitOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn richardson(mut self, exponent: f64) -> Self {
        self.richardson = Some(exponent);
        self
    }

    pub fn window(mut self, window: usize) -> Self {
        self.window = window.max(2);
        self
    }
}

/// Geometric grid `start, start*ratio, ...` capped at `max` (inclusive of the
/// first point at or above `max`).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GeometricGrid {
    pub start: f64,
    pub ratio: f64,
    pub max: f64,
}

impl GeometricGrid {
    pub fn new(start: f64, ratio: f64, max: f64) -> Self {
        Self { start, ratio, max }
    }

    /// Default ray grid for angular limits: y = 1, 2, 4, ... up to 1e8.
    pub fn ray() -> Self {
        Self::new(1.0, 2.0, 1e8)
    }

    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut x = self.start;
        loop {
            out.push(x);
            if x >= self.max {
                break;
            }
            x *= self.ratio;
        }
        out
    }
}

fn tail_of(samples: &[(f64, Complex64)], len: usize) -> Vec<(f64, Complex64)> {
    let start = samples.len().saturating_sub(len);
    samples[start..].to_vec()
}

/// Estimate the limit of `samples` (ascending geometric abscissae).
pub fn estimate_limit(samples: &[(f64, Complex64)], opts: &LimitOptions) -> LimitEstimate {
    let window = opts.window.max(2);
    if samples.len() < window + 1 {
        return LimitEstimate::undetermined(samples.to_vec());
    }

    // Divergence first: magnitudes above threshold and still growing.
    let raw_tail = tail_of(samples, window + 2);
    let mags: Vec<f64> = raw_tail.iter().map(|(_, v)| v.norm()).collect();
    let growing = mags.windows(2).all(|w| w[1] >= w[0]);
    if growing && *mags.last().unwrap() > opts.divergence_threshold {
        return LimitEstimate {
            value: LimitValue::Infinite,
            converged: false,
            error_indicator: f64::INFINITY,
            grid_tail: raw_tail,
        };
    }

    let seq: Vec<(f64, Complex64)> = match opts.richardson {
        None => samples.to_vec(),
        Some(p) => samples
            .windows(2)
            .map(|w| {
                let (x0, f0) = w[0];
                let (x1, f1) = w[1];
                let rho = (x1 / x0).powf(p);
                ((x1), (f1 * rho - f0) / (rho - 1.0))
            })
            .collect(),
    };
    if seq.len() < window {
        return LimitEstimate::undetermined(seq);
    }

    let tail = tail_of(&seq, window);
    let last = tail.last().unwrap().1;
    let mut max_diff: f64 = 0.0;
    for i in 0..tail.len() {
        for j in (i + 1)..tail.len() {
            max_diff = max_diff.max((tail[i].1 - tail[j].1).norm());
        }
    }
    let scale = last.norm().max(opts.scale_floor);
    if max_diff <= opts.rel_tol * scale {
        return LimitEstimate {
            value: LimitValue::Finite(last),
            converged: true,
            error_indicator: max_diff / scale,
            grid_tail: tail,
        };
    }

    // Decay to zero: tail magnitudes shrinking under the floor. Reported as a
    // converged zero limit with the last magnitude as the error indicator.
    let tail_mags: Vec<f64> = tail.iter().map(|(_, v)| v.norm()).collect();
    let shrinking = tail_mags.windows(2).all(|w| w[1] <= w[0]);
    let halved = tail_mags.last().unwrap() <= &(0.5 * tail_mags[0]);
    if shrinking && halved && *tail_mags.last().unwrap() < opts.zero_floor {
        return LimitEstimate {
            value: LimitValue::Finite(Complex64::new(0.0, 0.0)),
            converged: true,
            error_indicator: *tail_mags.last().unwrap(),
            grid_tail: tail,
        };
    }

    LimitEstimate {
        value: LimitValue::Finite(last),
        converged: false,
        error_indicator: max_diff / scale,
        grid_tail: tail,
    }
}

/// Sample `f` on the grid and estimate its limit.
pub fn estimate_limit_of<F: Fn(f64) -> Complex64>(
    f: F,
    grid: &GeometricGrid,
    opts: &LimitOptions,
) -> LimitEstimate {
    let samples: Vec<(f64, Complex64)> = grid.values().into_iter().map(|x| (x, f(x))).collect();
    estimate_limit(&samples, opts)
}
