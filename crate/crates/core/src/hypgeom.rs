//! Hyperbolic geometry of the upper half-plane and of the slit plane
//! `K = C \ (-inf, 0]`, plus the total-speed deviation series.
//!
//! `dist_h` uses the cancellation-free form
//!
//! ```text
//! d_H(z, w) = log( (|z - conj(w)| + |z - w|) / (2 sqrt(Im z Im w)) ),
//! ```
//!
//! equivalent to the usual `log((1+rho)/(1-rho))/2` because
//! `|z - conj(w)|^2 - |z - w|^2 = 4 Im(z) Im(w)`. The log argument is fed
//! through `ln_1p` of the exact excess over 1, so nearby points at large
//! heights keep full precision; the deviation limits downstream need ~1e-6
//! absolute accuracy at |phi_t| ~ 1e4.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flow::Orbit;
use crate::limits::{estimate_limit, LimitEstimate, LimitOptions, LimitValue};

/// Hyperbolic distance in the upper half-plane.
pub fn dist_h(z: Complex64, w: Complex64) -> Result<f64> {
    if !(z.im > 0.0) {
        return Err(Error::NotInHalfPlane(z));
    }
    if !(w.im > 0.0) {
        return Err(Error::NotInHalfPlane(w));
    }
    // |z - conj(w)|^2 = |z - w|^2 + 4 Im(z) Im(w), so with q = |z - w| / (2r),
    // r = sqrt(Im z Im w), the log argument is 1 + q^2/(sqrt(q^2+1)+1) + q:
    // no cancellation anywhere, and q stays finite long after |z - w|^2
    // would have overflowed.
    let r = (z.im * w.im).sqrt();
    let q = (z - w).norm() / (2.0 * r);
    Ok((q * q / ((q * q + 1.0).sqrt() + 1.0) + q).ln_1p())
}

fn on_slit(a: Complex64) -> bool {
    a.im == 0.0 && a.re <= 0.0
}

/// Hyperbolic distance in `K = C \ (-inf, 0]`, via the chart `a -> i sqrt(a)`
/// (principal square root, which maps `K` onto the right half-plane).
pub fn dist_k(a: Complex64, b: Complex64) -> Result<f64> {
    if on_slit(a) {
        return Err(Error::OnSlit(a));
    }
    if on_slit(b) {
        return Err(Error::OnSlit(b));
    }
    let i = Complex64::new(0.0, 1.0);
    dist_h(i * a.sqrt(), i * b.sqrt())
}

/// Which normalizer to subtract from the total speed `d_H(i, phi_t(z))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpeedMode {
    /// Subtract `log(t)/4` (parabolic, zero hyperbolic step).
    ZeroStep,
    /// Subtract `log(t)` (parabolic, positive hyperbolic step).
    PositiveStep,
    /// Subtract `lambda t / 2` (hyperbolic with spectral value lambda).
    Hyperbolic(f64),
}

impl SpeedMode {
    fn normalizer(&self, t: f64) -> f64 {
        match *self {
            SpeedMode::ZeroStep => 0.25 * t.ln(),
            SpeedMode::PositiveStep => t.ln(),
            SpeedMode::Hyperbolic(lambda) => 0.5 * lambda * t,
        }
    }
}

/// Deviation of the total speed from its mode's normalizer.
#[derive(Clone, Debug)]
pub struct SpeedDeviationSeries {
    pub mode: SpeedMode,
    /// `(t, d_H(i, phi_t(z)) - normalizer(t))` for t > 0, strictly increasing t.
    pub points: Vec<(f64, f64)>,
    pub limit: LimitEstimate,
}

impl SpeedDeviationSeries {
    /// CSV columns: t, deviation.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "t,deviation")?;
        for &(t, d) in &self.points {
            writeln!(out, "{t:.16e},{d:.16e}")?;
        }
        Ok(())
    }
}

/// Compute the deviation series of an orbit and estimate its limit.
///
/// In zero-step mode a convergent limit equals `log(lim |phi_t|/sqrt(t))/2`;
/// divergence to `+inf` signals a non-extremal rate.
pub fn total_speed_deviation(orbit: &Orbit, mode: SpeedMode) -> Result<SpeedDeviationSeries> {
    let i = Complex64::new(0.0, 1.0);
    let mut points = Vec::new();
    for &(t, z) in orbit.samples.iter().filter(|&&(t, _)| t > 0.0) {
        points.push((t, dist_h(i, z)? - mode.normalizer(t)));
    }
    let samples: Vec<(f64, Complex64)> = points
        .iter()
        .map(|&(t, d)| (t, Complex64::new(d, 0.0)))
        .collect();
    // Deviations approach their limit like 1/t on extremal orbits. They are
    // measured in hyperbolic units of size O(1), so convergence is judged on
    // an absolute 1e-6 scale; a limit of exactly 0 is an ordinary value here,
    // not a special verdict.
    let mut opts = LimitOptions::with_rel_tol(1e-6).richardson(1.0);
    opts.scale_floor = 1.0;
    opts.zero_floor = 0.0;
    let mut limit = estimate_limit(&samples, &opts);
    // Logarithmic escape never trips the magnitude-based divergence check;
    // a tail that keeps climbing by O(1) per octave is divergence to +inf.
    if !limit.converged && !limit.value.is_infinite() {
        let window = opts.window + 2;
        if points.len() >= window {
            let tail = &points[points.len() - window..];
            let increasing = tail.windows(2).all(|w| w[1].1 > w[0].1);
            let gain = tail[tail.len() - 1].1 - tail[0].1;
            if increasing && gain > 0.05 {
                limit.value = LimitValue::Infinite;
            }
        }
    }
    Ok(SpeedDeviationSeries {
        mode,
        points,
        limit,
    })
}
