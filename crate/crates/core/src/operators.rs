//! Disc conjugation of half-plane flows and growth of the induced
//! composition-operator norms on Hardy and Bergman spaces.
//!
//! Only norm envelopes are computed: the two-sided bounds determined by
//! `|psi_t(0)|` alone. Exact composition-operator norms are out of scope.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::Orbit;
use crate::limits::{estimate_limit, LimitEstimate, LimitOptions};

/// Moebius map `S(z) = i (tau + z)/(tau - z)` from the unit disc onto the
/// upper half-plane, sending `tau` on the circle to infinity.
pub fn cayley_to_halfplane(tau: Complex64, point: Complex64) -> Result<Complex64> {
    check_unimodular(tau)?;
    if !(point.norm() < 1.0) {
        return Err(Error::NotInDisc(point));
    }
    Ok(Complex64::new(0.0, 1.0) * (tau + point) / (tau - point))
}

/// Inverse Cayley map `S^{-1}(w) = tau (w - i)/(w + i)`.
pub fn cayley_to_disc(tau: Complex64, point: Complex64) -> Result<Complex64> {
    check_unimodular(tau)?;
    if !(point.im > 0.0) {
        return Err(Error::NotInHalfPlane(point));
    }
    let i = Complex64::new(0.0, 1.0);
    Ok(tau * (point - i) / (point + i))
}

fn check_unimodular(tau: Complex64) -> Result<()> {
    if (tau.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} must lie on the unit circle"
        )));
    }
    Ok(())
}

/// Orbit of the conjugated flow in the unit disc, converging to `tau`.
#[derive(Clone, Debug)]
pub struct DiscOrbit {
    pub tau: Complex64,
    pub samples: Vec<(f64, Complex64)>,
}

/// Conjugate a half-plane orbit into the disc with attracting point `tau`.
pub fn conjugate_orbit(orbit: &Orbit, tau: Complex64) -> Result<DiscOrbit> {
    let samples = orbit
        .samples
        .iter()
        .map(|&(t, z)| Ok((t, cayley_to_disc(tau, z)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscOrbit { tau, samples })
}

/// The product series `|psi_t(z) - tau| * |phi_t(w)|` and its limit, which
/// is 2 whenever the half-plane orbit escapes to infinity.
#[derive(Clone, Debug)]
pub struct ProductCheck {
    pub series: Vec<(f64, f64)>,
    pub limit: LimitEstimate,
}

pub fn product_check(disc_orbit: &DiscOrbit, halfplane_orbit: &Orbit) -> ProductCheck {
    let series: Vec<(f64, f64)> = disc_orbit
        .samples
        .iter()
        .zip(&halfplane_orbit.samples)
        .filter(|&(&(t, _), _)| t > 0.0)
        .map(|(&(t, psi), &(_, phi))| (t, (psi - disc_orbit.tau).norm() * phi.norm()))
        .collect();
    let samples: Vec<(f64, Complex64)> = series
        .iter()
        .map(|&(t, v)| (t, Complex64::new(v, 0.0)))
        .collect();
    // |psi_t - tau| |phi_t| = 2 + O(1/|phi_t|), i.e. O(1/sqrt(t)) on
    // extremal orbits.
    let opts = LimitOptions::with_rel_tol(1e-4).richardson(0.5);
    let limit = estimate_limit(&samples, &opts);
    ProductCheck { series, limit }
}

/// Function space on which the composition operators act.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Hardy,
    Bergman,
}

impl Space {
    /// Envelope exponent: Hardy bounds carry 1/p, Bergman 2/p.
    fn exponent(&self, p: f64) -> f64 {
        match self {
            Space::Hardy => 1.0 / p,
            Space::Bergman => 2.0 / p,
        }
    }

    /// Growth normalizer for `envelope^p`: sqrt(t) on Hardy, t on Bergman.
    fn normalizer(&self, t: f64) -> f64 {
        match self {
            Space::Hardy => t.sqrt(),
            Space::Bergman => t,
        }
    }
}

/// Two-sided bound on the composition-operator norm induced by a self-map
/// with `|g(0)| = r`:
/// `(1/(1-r^2))^e <= ||C_g|| <= ((1+r)/(1-r))^e`, `e` the space exponent.
pub fn norm_envelope(space: Space, r: f64, p: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "|g(0)| = {r} must lie in [0, 1)"
        )));
    }
    if p < 1.0 {
        return Err(Error::InvalidParameter(format!("p = {p} must be >= 1")));
    }
    let e = space.exponent(p);
    let lower = (1.0 / (1.0 - r * r)).powf(e);
    let upper = ((1.0 + r) / (1.0 - r)).powf(e);
    Ok((lower, upper))
}

pub fn hardy_bounds(r: f64, p: f64) -> Result<(f64, f64)> {
    norm_envelope(Space::Hardy, r, p)
}

pub fn bergman_bounds(r: f64, p: f64) -> Result<(f64, f64)> {
    norm_envelope(Space::Bergman, r, p)
}

/// One row of the norm-growth series.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormGrowthRow {
    pub t: f64,
    pub one_minus_abs_psi: f64,
    pub envelope_lower: f64,
    pub envelope_upper: f64,
    /// `envelope^p` scaled by sqrt(t) (Hardy) or t (Bergman), both ends.
    pub ratio_lower: f64,
    pub ratio_upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedVerdict {
    Bounded,
    Unbounded,
    Undetermined,
}

/// Norm-envelope growth along a disc orbit.
#[derive(Clone, Debug)]
pub struct NormGrowth {
    pub space: Space,
    pub p: f64,
    pub rows: Vec<NormGrowthRow>,
    pub verdict: BoundedVerdict,
}

impl NormGrowth {
    /// CSV columns: t, one_minus_abs_psi, envelope_lower, envelope_upper,
    /// ratio_lower, ratio_upper.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "t,one_minus_abs_psi,envelope_lower,envelope_upper,ratio_lower,ratio_upper"
        )?;
        for row in &self.rows {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                row.t,
                row.one_minus_abs_psi,
                row.envelope_lower,
                row.envelope_upper,
                row.ratio_lower,
                row.ratio_upper
            )?;
        }
        Ok(())
    }
}

/// Check whether `envelope^p / n(t)` stays inside `[1/bound, bound]` over the
/// tail of the orbit (`t >= 1` rows only).
pub fn norm_growth_check(
    disc_orbit: &DiscOrbit,
    p: f64,
    space: Space,
    bound: f64,
) -> Result<NormGrowth> {
    let mut rows = Vec::new();
    for &(t, psi) in disc_orbit.samples.iter().filter(|&&(t, _)| t >= 1.0) {
        let r = psi.norm();
        let (lower, upper) = norm_envelope(space, r, p)?;
        let n = space.normalizer(t);
        rows.push(NormGrowthRow {
            t,
            one_minus_abs_psi: 1.0 - r,
            envelope_lower: lower,
            envelope_upper: upper,
            ratio_lower: lower.powf(p) / n,
            ratio_upper: upper.powf(p) / n,
        });
    }
    let tail_len = 8.min(rows.len());
    let verdict = if tail_len < 4 {
        BoundedVerdict::Undetermined
    } else {
        let tail = &rows[rows.len() - tail_len..];
        let inside = tail.iter().all(|row| {
            row.ratio_lower >= 1.0 / bound
                && row.ratio_lower <= bound
                && row.ratio_upper >= 1.0 / bound
                && row.ratio_upper <= bound
        });
        if inside {
            BoundedVerdict::Bounded
        } else {
            BoundedVerdict::Unbounded
        }
    };
    Ok(NormGrowth {
        space,
        p,
        rows,
        verdict,
    })
}
