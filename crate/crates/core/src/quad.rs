//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands.
//!
//! One engine serves both the measure integrals (real line, after a tangent
//! substitution) and the path integrals used to build Koenigs functions
//! (complex segments parametrized over [0, 1]). Refinement is global: the
//! interval with the largest error estimate is split first, so sharp peaks
//! do not starve under a width-proportional error budget.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ABS_TOL: f64 = 1e-14;
const DEFAULT_MAX_INTERVALS: usize = 4096;

// 15-point Kronrod nodes and weights on [-1, 1]; the embedded 7-point Gauss
// rule uses the odd-indexed nodes. Digits beyond f64 are kept as published.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances for one adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadTol {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self {
            rel: DEFAULT_REL_TOL,
            abs: DEFAULT_ABS_TOL,
            max_intervals: DEFAULT_MAX_INTERVALS,
        }
    }
}

impl QuadTol {
    pub fn with_rel(rel: f64) -> Self {
        Self {
            rel,
            ..Self::default()
        }
    }
}

/// Result of an adaptive integration: value, error estimate, and whether the
/// requested tolerance was met before the interval budget ran out.
#[derive(Clone, Copy, Debug)]
pub struct QuadOutcome {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
    pub intervals: usize,
}

struct Segment {
    error: f64,
    a: f64,
    b: f64,
    value: Complex64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    kronrod *= half;
    gauss *= half;
    ((kronrod), (kronrod - gauss).norm())
}

/// Integrate `f` over `[a, b]`, splitting the worst interval until the sum
/// of the error estimates drops below `max(tol.abs, tol.rel * |value|)`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: &QuadTol) -> QuadOutcome {
    if a == b {
        return QuadOutcome {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            converged: true,
            intervals: 0,
        };
    }

    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { error, a, b, value });
    let mut total = value;
    let mut total_err = error;
    // Segments too narrow to split are parked so they stop dominating the heap.
    let mut parked_err = 0.0;
    let mut intervals = 1usize;

    loop {
        let target = tol.abs.max(tol.rel * total.norm());
        if total_err + parked_err <= target {
            return QuadOutcome {
                value: total,
                error: total_err + parked_err,
                converged: true,
                intervals,
            };
        }
        if intervals >= tol.max_intervals {
            return QuadOutcome {
                value: total,
                error: total_err + parked_err,
                converged: false,
                intervals,
            };
        }
        let worst = match heap.pop() {
            Some(seg) => seg,
            None => {
                // Everything is parked; report whatever accuracy remains.
                let err = parked_err;
                return QuadOutcome {
                    value: total,
                    error: err,
                    converged: err <= target,
                    intervals,
                };
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            parked_err += worst.error;
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = kronrod15(&f, worst.a, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        intervals += 1;
        heap.push(Segment {
            error: e1,
            a: worst.a,
            b: mid,
            value: v1,
        });
        heap.push(Segment {
            error: e2,
            a: mid,
            b: worst.b,
            value: v2,
        });
    }
}

/// Integrate a holomorphic integrand along the straight segment from `a` to `b`.
pub fn integrate_segment<F: Fn(Complex64) -> Complex64>(
    f: &F,
    a: Complex64,
    b: Complex64,
    tol: &QuadTol,
) -> QuadOutcome {
    let delta = b - a;
    if delta.norm() == 0.0 {
        return QuadOutcome {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            converged: true,
            intervals: 0,
        };
    }
    integrate(|t| f(a + delta * t) * delta, 0.0, 1.0, tol)
}

/// Integrate along a polyline through `points`, summing per-segment results.
pub fn integrate_polyline<F: Fn(Complex64) -> Complex64>(
    f: &F,
    points: &[Complex64],
    tol: &QuadTol,
) -> QuadOutcome {
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut converged = true;
    let mut intervals = 0;
    for pair in points.windows(2) {
        let out = integrate_segment(f, pair[0], pair[1], tol);
        value += out.value;
        error += out.error;
        converged &= out.converged;
        intervals += out.intervals;
    }
    QuadOutcome {
        value,
        error,
        converged,
        intervals,
    }
}
