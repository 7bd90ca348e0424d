//! Orbit integration for the flow `d phi_t / dt = G(phi_t)` and the
//! dynamical quantities measured along orbits.
//!
//! Long horizons use the substituted time `u = log(1 + t)`, under which the
//! flow becomes `d phi / du = (1 + t) G(phi)`; orbits that grow like `sqrt(t)`
//! then need a bounded number of steps per decade of `t`. The stepper is an
//! embedded Dormand-Prince 5(4) pair with the usual PI-free step control and
//! a hard guard that every accepted state stays in the upper half-plane.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{HerglotzTriplet, ShiftVerdict, StepVerdict};
use crate::hypgeom;
use crate::limits::LimitOptions;
use crate::quad::QuadTol;

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-13;
pub const DEFAULT_MAX_STEPS: usize = 2_000_000;
/// Hyperbolic-step sequences below this are treated as tending to zero.
pub const DEFAULT_STEP_THRESHOLD: f64 = 1e-4;
/// Imaginary parts still growing by this factor over the last decade of t
/// mark an infinite shift.
pub const DEFAULT_SHIFT_GROWTH: f64 = 1.5;
pub const DEFAULT_SHIFT_TOL: f64 = 1e-6;

const TWO_ATOM_NEWTON_TOL: f64 = 1e-13;
const TWO_ATOM_NEWTON_MAX_ITERS: usize = 80;

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// Error weights: fifth-order minus embedded fourth-order coefficients.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator settings.
#[derive(Clone, Debug)]
pub struct FlowConfig {
    pub rtol: f64,
    pub atol: f64,
    pub quad: QuadTol,
    pub max_steps: usize,
    pub step_threshold: f64,
    pub shift_growth: f64,
    pub shift_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            quad: QuadTol::default(),
            max_steps: DEFAULT_MAX_STEPS,
            step_threshold: DEFAULT_STEP_THRESHOLD,
            shift_growth: DEFAULT_SHIFT_GROWTH,
            shift_tol: DEFAULT_SHIFT_TOL,
        }
    }
}

/// Sampling schedule in physical time. The default doubles from 1 up to the
/// horizon: 0, 1, 2, 4, ..., t_max.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    Geometric { t_max: f64 },
    Explicit(Vec<f64>),
}

impl Schedule {
    pub fn geometric(t_max: f64) -> Self {
        Schedule::Geometric { t_max }
    }

    /// Monotone list of sample times, always beginning at 0.
    pub fn times(&self) -> Vec<f64> {
        match self {
            Schedule::Geometric { t_max } => {
                let mut out = vec![0.0];
                let mut t = 1.0;
                while t < *t_max {
                    out.push(t);
                    t *= 2.0;
                }
                if *t_max > 0.0 {
                    out.push(*t_max);
                }
                out
            }
            Schedule::Explicit(ts) => {
                let mut out: Vec<f64> = ts.iter().copied().filter(|t| *t >= 0.0).collect();
                out.sort_by(f64::total_cmp);
                out.dedup();
                if out.first() != Some(&0.0) {
                    out.insert(0, 0.0);
                }
                out
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Schedule::Geometric { t_max } => format!("geometric doubling to t_max = {t_max:e}"),
            Schedule::Explicit(ts) => format!("explicit grid with {} points", ts.len()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejections: usize,
    pub max_local_error: f64,
}

/// A sampled orbit `t -> phi_t(z0)`.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub z0: Complex64,
    pub samples: Vec<(f64, Complex64)>,
    pub schedule: String,
    pub stats: IntegratorStats,
}

impl Orbit {
    pub fn horizon(&self) -> f64 {
        self.samples.last().map(|&(t, _)| t).unwrap_or(0.0)
    }

    pub fn value_at_end(&self) -> Complex64 {
        self.samples.last().expect("orbit has samples").1
    }

    /// CSV columns: t, re, im, abs, arg.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "t,re,im,abs,arg")?;
        for &(t, z) in &self.samples {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t,
                z.re,
                z.im,
                z.norm(),
                z.arg()
            )?;
        }
        Ok(())
    }
}

enum TimeChart {
    /// Integrate in u = log(1 + t); the state variable `u` maps to t = e^u - 1.
    Log,
    /// Integrate in plain time offset by `t0`.
    Plain { t0: f64 },
}

impl TimeChart {
    fn physical(&self, u: f64) -> f64 {
        match self {
            TimeChart::Log => u.exp_m1(),
            TimeChart::Plain { t0 } => t0 + u,
        }
    }
}

struct Stepper<'a> {
    triplet: &'a HerglotzTriplet,
    chart: TimeChart,
    cfg: &'a FlowConfig,
    stats: IntegratorStats,
    h: f64,
}

impl<'a> Stepper<'a> {
    fn new(triplet: &'a HerglotzTriplet, chart: TimeChart, cfg: &'a FlowConfig) -> Self {
        Self {
            triplet,
            chart,
            cfg,
            stats: IntegratorStats::default(),
            h: 1e-4,
        }
    }

    fn deriv(&self, u: f64, y: Complex64) -> Result<Complex64> {
        let g = self.triplet.eval(y, &self.cfg.quad)?;
        Ok(match self.chart {
            TimeChart::Log => g * u.exp(),
            TimeChart::Plain { .. } => g,
        })
    }

    /// A stage may probe outside the half-plane on an oversized trial step;
    /// that only means the step must shrink, not that the orbit failed.
    fn stage(&self, u: f64, y: Complex64) -> Result<Option<Complex64>> {
        if !y.is_finite() || !(y.im > 0.0) {
            return Ok(None);
        }
        match self.deriv(u, y) {
            Ok(k) => Ok(Some(k)),
            Err(Error::NotInHalfPlane(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// One trial step; `None` means the step left the half-plane and must be
    /// retried shorter.
    fn try_step(
        &self,
        u: f64,
        y: Complex64,
        k1: Complex64,
        h: f64,
    ) -> Result<Option<(Complex64, f64, Complex64)>> {
        macro_rules! stage {
            ($u:expr, $y:expr) => {
                match self.stage($u, $y)? {
                    Some(k) => k,
                    None => return Ok(None),
                }
            };
        }
        let k2 = stage!(u + C2 * h, y + h * (A21 * k1));
        let k3 = stage!(u + C3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = stage!(u + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = stage!(
            u + C5 * h,
            y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)
        );
        let k6 = stage!(
            u + h,
            y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)
        );
        let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        if !y_new.is_finite() || !(y_new.im > 0.0) {
            return Ok(None);
        }
        let k7 = stage!(u + h, y_new);
        let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let scale = self.cfg.atol + self.cfg.rtol * y.norm().max(y_new.norm());
        Ok(Some((y_new, err.norm() / scale, k7)))
    }

    /// Advance from (u, y) to u_end, returning the state there.
    fn advance(&mut self, u_start: f64, y_start: Complex64, u_end: f64) -> Result<Complex64> {
        let mut u = u_start;
        let mut y = y_start;
        if u_end <= u {
            return Ok(y);
        }
        let mut k1 = self.deriv(u, y)?;
        loop {
            let span_left = u_end - u;
            if span_left <= 0.0 {
                return Ok(y);
            }
            let mut h = self.h.min(span_left);
            loop {
                if self.stats.steps + self.stats.rejections >= self.cfg.max_steps {
                    return Err(Error::StepBudgetExceeded(self.cfg.max_steps));
                }
                if h < 1e-14 * (1.0 + u.abs()) {
                    return Err(Error::StepSizeUnderflow {
                        t: self.chart.physical(u),
                        z: y,
                        step: h,
                    });
                }
                match self.try_step(u, y, k1, h)? {
                    Some((y_new, scaled_err, k7)) if scaled_err <= 1.0 => {
                        self.stats.steps += 1;
                        self.stats.max_local_error = self.stats.max_local_error.max(scaled_err);
                        u += h;
                        y = y_new;
                        k1 = k7; // first-same-as-last
                        let factor = if scaled_err > 0.0 {
                            (0.9 * scaled_err.powf(-0.2)).clamp(0.2, 5.0)
                        } else {
                            5.0
                        };
                        self.h = h * factor;
                        break;
                    }
                    Some((_, scaled_err, _)) => {
                        self.stats.rejections += 1;
                        h *= (0.9 * scaled_err.powf(-0.2)).clamp(0.1, 0.5);
                    }
                    None => {
                        self.stats.rejections += 1;
                        h *= 0.5;
                    }
                }
            }
        }
    }
}

fn require_upper(z: Complex64) -> Result<()> {
    if z.im > 0.0 {
        Ok(())
    } else {
        Err(Error::NotInHalfPlane(z))
    }
}

/// Integrate the flow of `triplet` from `z0`, sampling on `schedule`.
pub fn integrate_orbit(
    triplet: &HerglotzTriplet,
    z0: Complex64,
    schedule: &Schedule,
    cfg: &FlowConfig,
) -> Result<Orbit> {
    require_upper(z0)?;
    if triplet.is_trivial() {
        return Err(Error::TrivialGenerator);
    }
    let times = schedule.times();
    let mut stepper = Stepper::new(triplet, TimeChart::Log, cfg);
    let mut samples = Vec::with_capacity(times.len());
    let mut y = z0;
    let mut u = 0.0;
    for &t in &times {
        let u_target = t.ln_1p();
        y = stepper.advance(u, y, u_target)?;
        u = u_target;
        samples.push((t, y));
    }
    Ok(Orbit {
        z0,
        samples,
        schedule: schedule.describe(),
        stats: stepper.stats,
    })
}

/// Value of the flow at a single time.
pub fn flow_value(
    triplet: &HerglotzTriplet,
    z0: Complex64,
    t: f64,
    cfg: &FlowConfig,
) -> Result<Complex64> {
    let orbit = integrate_orbit(triplet, z0, &Schedule::Explicit(vec![0.0, t]), cfg)?;
    Ok(orbit.value_at_end())
}

/// Closed-form flows used as oracles for the integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedFormFamily {
    /// `G(z) = lambda z`, flow `e^{lambda t} z0`.
    Linear { lambda: f64 },
    /// `G(z) = c`, flow `z0 + c t`.
    Constant { c: f64 },
    /// `G(z) = -m/z`, flow `sqrt(z0^2 - 2 m t)` with the branch in the
    /// upper half-plane.
    Inverse { m: f64 },
    /// `G(z) = 2z/(1 - z^2)`; the flow solves
    /// `log(phi)/2 - phi^2/4 = log(z0)/2 - z0^2/4 + t` implicitly.
    TwoAtom,
}

impl ClosedFormFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedFormFamily::Linear { .. } => "linear",
            ClosedFormFamily::Constant { .. } => "constant",
            ClosedFormFamily::Inverse { .. } => "inverse",
            ClosedFormFamily::TwoAtom => "two_atom",
        }
    }

    /// The Herglotz data generating this flow.
    pub fn triplet(&self) -> Result<HerglotzTriplet> {
        match *self {
            ClosedFormFamily::Linear { lambda } => HerglotzTriplet::linear(lambda),
            ClosedFormFamily::Constant { c } => HerglotzTriplet::constant(c),
            ClosedFormFamily::Inverse { m } => HerglotzTriplet::inverse(m),
            ClosedFormFamily::TwoAtom => HerglotzTriplet::two_atom(),
        }
    }

    /// Exact (or implicitly solved) orbit on a schedule.
    pub fn orbit(&self, z0: Complex64, schedule: &Schedule) -> Result<Orbit> {
        require_upper(z0)?;
        let times = schedule.times();
        let mut samples = Vec::with_capacity(times.len());
        match *self {
            ClosedFormFamily::Linear { lambda } => {
                for &t in &times {
                    samples.push((t, z0 * (lambda * t).exp()));
                }
            }
            ClosedFormFamily::Constant { c } => {
                for &t in &times {
                    samples.push((t, z0 + c * t));
                }
            }
            ClosedFormFamily::Inverse { m } => {
                for &t in &times {
                    samples.push((t, upper_sqrt(z0 * z0 - 2.0 * m * t)));
                }
            }
            ClosedFormFamily::TwoAtom => {
                let base = two_atom_potential(z0);
                let mut guess = z0;
                for &t in &times {
                    let w = two_atom_solve(base + t, guess, t)?;
                    guess = w;
                    samples.push((t, w));
                }
            }
        }
        Ok(Orbit {
            z0,
            samples,
            schedule: schedule.describe(),
            stats: IntegratorStats::default(),
        })
    }

    /// Single closed-form value; the implicit family solves along a doubling
    /// ladder so Newton always starts from a nearby point.
    pub fn value(&self, z0: Complex64, t: f64) -> Result<Complex64> {
        let orbit = self.orbit(z0, &Schedule::Explicit(ladder_to(t)))?;
        Ok(orbit.value_at_end())
    }
}

fn ladder_to(t: f64) -> Vec<f64> {
    let mut ts = vec![0.0];
    let mut s = 1.0;
    while s < t {
        ts.push(s);
        s *= 2.0;
    }
    ts.push(t);
    ts
}

/// Square root with the branch chosen in the closed upper half-plane.
fn upper_sqrt(w: Complex64) -> Complex64 {
    let r = w.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

fn two_atom_potential(w: Complex64) -> Complex64 {
    0.5 * w.ln() - w * w / 4.0
}

fn two_atom_solve(target: Complex64, guess: Complex64, t: f64) -> Result<Complex64> {
    let mut w = guess;
    for _ in 0..TWO_ATOM_NEWTON_MAX_ITERS {
        let residual = two_atom_potential(w) - target;
        if residual.norm() <= TWO_ATOM_NEWTON_TOL * (1.0 + target.norm()) {
            return Ok(w);
        }
        let deriv = 0.5 / w - 0.5 * w;
        if deriv.norm() == 0.0 {
            break;
        }
        let mut step = residual / deriv;
        // Damp the step until it stays in the upper half-plane.
        let mut damp = 0;
        while (w - step).im <= 0.0 && damp < 48 {
            step *= 0.5;
            damp += 1;
        }
        w -= step;
    }
    let residual = (two_atom_potential(w) - target).norm();
    Err(Error::NewtonDidNotConverge { t, residual })
}

/// Relative defect of the flow property `phi_{t+s} = phi_t o phi_s`,
/// measured through three independent integrations.
pub fn semigroup_residual(
    triplet: &HerglotzTriplet,
    z: Complex64,
    s: f64,
    t: f64,
    cfg: &FlowConfig,
) -> Result<f64> {
    let direct = flow_value(triplet, z, t + s, cfg)?;
    let inner = flow_value(triplet, z, s, cfg)?;
    let composed = flow_value(triplet, inner, t, cfg)?;
    Ok((direct - composed).norm() / (1.0 + direct.norm()))
}

/// Hyperbolic-step series and verdict.
#[derive(Clone, Debug)]
pub struct StepEstimate {
    /// `(t, d_H(phi_{t+1}, phi_t))`, with the unit advance re-integrated.
    pub series: Vec<(f64, f64)>,
    pub verdict: StepVerdict,
    pub last_value: f64,
}

/// Estimate `lim d_H(phi_{t+1}(z), phi_t(z))` from an integrated orbit.
///
/// Each unit-time advance is re-integrated from the sample value rather than
/// interpolated; interpolation error would swamp a limit tending to zero.
pub fn hyperbolic_step_estimate(
    orbit: &Orbit,
    triplet: &HerglotzTriplet,
    cfg: &FlowConfig,
) -> Result<StepEstimate> {
    let mut series = Vec::new();
    for &(t, z) in orbit.samples.iter().filter(|&&(t, _)| t >= 1.0) {
        let mut stepper = Stepper::new(triplet, TimeChart::Plain { t0: t }, cfg);
        let advanced = stepper.advance(0.0, z, 1.0)?;
        series.push((t, hypgeom::dist_h(advanced, z)?));
    }
    let window = LimitOptions::default().window;
    if series.len() < window + 1 {
        return Ok(StepEstimate {
            verdict: StepVerdict::Undetermined,
            last_value: series.last().map(|&(_, d)| d).unwrap_or(0.0),
            series,
        });
    }
    let tail: Vec<f64> = series[series.len() - window..]
        .iter()
        .map(|&(_, d)| d)
        .collect();
    let last = *tail.last().unwrap();
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let spread = tail.iter().cloned().fold(f64::MIN, f64::max)
        - tail.iter().cloned().fold(f64::MAX, f64::min);
    let verdict = if last < cfg.step_threshold && decreasing {
        StepVerdict::Zero
    } else if last >= cfg.step_threshold && spread <= 0.05 * last {
        StepVerdict::Positive
    } else {
        StepVerdict::Undetermined
    };
    Ok(StepEstimate {
        verdict,
        last_value: last,
        series,
    })
}

/// Shift estimate: does `Im phi_t` stay bounded?
#[derive(Clone, Debug)]
pub struct ShiftEstimate {
    pub verdict: ShiftVerdict,
    pub sup_im: f64,
}

pub fn shift_classify(orbit: &Orbit, cfg: &FlowConfig) -> ShiftEstimate {
    let horizon = orbit.horizon();
    let im_last = orbit.value_at_end().im;
    let tail: Vec<f64> = orbit
        .samples
        .iter()
        .filter(|&&(t, _)| t >= horizon / 10.0)
        .map(|&(_, z)| z.im)
        .collect();
    let spread = tail.iter().cloned().fold(f64::MIN, f64::max)
        - tail.iter().cloned().fold(f64::MAX, f64::min);
    let verdict = if tail.len() < 2 {
        ShiftVerdict::Undetermined
    } else if spread <= cfg.shift_tol * im_last.max(1.0) {
        ShiftVerdict::Finite
    } else if im_last >= cfg.shift_growth * tail[0] {
        // Still climbing across the final decade of t.
        ShiftVerdict::Infinite
    } else {
        ShiftVerdict::Undetermined
    };
    ShiftEstimate {
        verdict,
        sup_im: im_last,
    }
}
