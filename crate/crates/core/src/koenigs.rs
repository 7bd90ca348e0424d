//! Koenigs linearization and conformality at the boundary fixed point.
//!
//! The parabolic chart solves `h(phi_t(z)) = h(z) + t`; differentiating
//! along the flow gives `h' = 1/G`, so `h` is recovered by integrating the
//! reciprocal vector field along paths in the (convex) half-plane, anchored
//! at `h(z0) = 1`. The hyperbolic chart solves `h(phi_t) = e^{lambda t} h`
//! via `h'/h = lambda/G`, anchored at `h(z0) = i`. Charts are built by
//! quadrature rather than by inverting the flow: direct path integrals are
//! uniformly accurate and need no orbit inversion.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{flow_value, FlowConfig};
use crate::generator::{CriterionVerdict, HerglotzTriplet};
use crate::limits::{estimate_limit, GeometricGrid, LimitEstimate, LimitOptions};
use crate::quad::{self, QuadTol};

/// Sampled h-values closer to the slit than this (relative to their size)
/// violate the square-root chart.
const SLIT_GUARD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "lambda")]
pub enum ChartKind {
    Parabolic,
    Hyperbolic(f64),
}

/// A Koenigs chart for the flow of `triplet`, anchored at `z0`.
#[derive(Clone, Debug)]
pub struct KoenigsChart<'a> {
    pub triplet: &'a HerglotzTriplet,
    pub kind: ChartKind,
    pub z0: Complex64,
    pub quad: QuadTol,
}

/// Serializable chart summary.
#[derive(Clone, Debug, Serialize)]
pub struct ChartDump {
    pub kind: ChartKind,
    pub z0: [f64; 2],
    pub anchor: [f64; 2],
    /// Minimum relative distance of the ray samples from the slit, when a
    /// square-root test has been run.
    pub min_slit_distance: Option<f64>,
}

impl<'a> KoenigsChart<'a> {
    pub fn parabolic(triplet: &'a HerglotzTriplet, z0: Complex64, quad: QuadTol) -> Result<Self> {
        if triplet.is_trivial() {
            return Err(Error::TrivialGenerator);
        }
        if triplet.alpha > 0.0 {
            return Err(Error::NotParabolic(triplet.alpha));
        }
        if !(z0.im > 0.0) {
            return Err(Error::NotInHalfPlane(z0));
        }
        Ok(Self {
            triplet,
            kind: ChartKind::Parabolic,
            z0,
            quad,
        })
    }

    pub fn hyperbolic(triplet: &'a HerglotzTriplet, z0: Complex64, quad: QuadTol) -> Result<Self> {
        if triplet.alpha <= 0.0 {
            return Err(Error::NotHyperbolic);
        }
        if !(z0.im > 0.0) {
            return Err(Error::NotInHalfPlane(z0));
        }
        Ok(Self {
            triplet,
            kind: ChartKind::Hyperbolic(triplet.alpha),
            z0,
            quad,
        })
    }

    /// Anchor value `h(z0)`.
    pub fn anchor(&self) -> Complex64 {
        match self.kind {
            ChartKind::Parabolic => Complex64::new(1.0, 0.0),
            ChartKind::Hyperbolic(_) => Complex64::new(0.0, 1.0),
        }
    }

    /// `int_{z0}^{z} dw / G(w)` along a polyline inside the half-plane.
    fn reciprocal_path_integral(&self, waypoints: &[Complex64]) -> Result<Complex64> {
        for w in waypoints {
            if !(w.im > 0.0) {
                return Err(Error::NotInHalfPlane(*w));
            }
        }
        let err_slot: RefCell<Option<Error>> = RefCell::new(None);
        let integrand = |w: Complex64| -> Complex64 {
            match self.triplet.eval(w, &self.quad) {
                Ok(g) => {
                    if g.norm() == 0.0 {
                        err_slot
                            .borrow_mut()
                            .get_or_insert(Error::VectorFieldVanishes(w));
                        Complex64::new(f64::NAN, f64::NAN)
                    } else {
                        1.0 / g
                    }
                }
                Err(e) => {
                    err_slot.borrow_mut().get_or_insert(e);
                    Complex64::new(f64::NAN, f64::NAN)
                }
            }
        };
        let out = quad::integrate_polyline(&integrand, waypoints, &self.quad);
        if let Some(e) = err_slot.into_inner() {
            return Err(e);
        }
        if !out.converged {
            return Err(Error::QuadratureDidNotConverge {
                partial: out.value,
                error: out.error,
            });
        }
        Ok(out.value)
    }

    /// Evaluate the chart along the straight segment from the base point.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.eval_via(z, &[])
    }

    /// Evaluate along `z0 -> via... -> z`; the value must not depend on the
    /// route, which the tests exercise.
    pub fn eval_via(&self, z: Complex64, via: &[Complex64]) -> Result<Complex64> {
        let mut waypoints = Vec::with_capacity(via.len() + 2);
        waypoints.push(self.z0);
        waypoints.extend_from_slice(via);
        waypoints.push(z);
        let integral = self.reciprocal_path_integral(&waypoints)?;
        Ok(match self.kind {
            ChartKind::Parabolic => Complex64::new(1.0, 0.0) + integral,
            ChartKind::Hyperbolic(lambda) => Complex64::new(0.0, 1.0) * (lambda * integral).exp(),
        })
    }

    pub fn dump(&self, min_slit_distance: Option<f64>) -> ChartDump {
        ChartDump {
            kind: self.kind,
            z0: [self.z0.re, self.z0.im],
            anchor: [self.anchor().re, self.anchor().im],
            min_slit_distance,
        }
    }
}

/// `|h(phi_t(z)) - h(z) - t| / (1 + t)` for a parabolic chart.
pub fn abel_residual(
    chart: &KoenigsChart<'_>,
    z: Complex64,
    t: f64,
    flow_cfg: &FlowConfig,
) -> Result<f64> {
    debug_assert_eq!(chart.kind, ChartKind::Parabolic);
    let advanced = flow_value(chart.triplet, z, t, flow_cfg)?;
    let lhs = chart.eval(advanced)?;
    let rhs = chart.eval(z)? + t;
    Ok((lhs - rhs).norm() / (1.0 + t))
}

/// `|h(phi_t(z)) - e^{lambda t} h(z)| / (1 + |e^{lambda t} h(z)|)`.
pub fn schroeder_residual(
    chart: &KoenigsChart<'_>,
    z: Complex64,
    t: f64,
    flow_cfg: &FlowConfig,
) -> Result<f64> {
    let lambda = match chart.kind {
        ChartKind::Hyperbolic(lambda) => lambda,
        ChartKind::Parabolic => return Err(Error::NotHyperbolic),
    };
    let advanced = flow_value(chart.triplet, z, t, flow_cfg)?;
    let lhs = chart.eval(advanced)?;
    let rhs = chart.eval(z)? * (lambda * t).exp();
    Ok((lhs - rhs).norm() / (1.0 + rhs.norm()))
}

/// Estimate `lim f(iy)/(iy)` along the imaginary ray. The sampler returns
/// `f(iy)` for the grid value `y`.
pub fn angular_ratio_limit<F: Fn(f64) -> Result<Complex64>>(
    sampler: F,
    grid: &GeometricGrid,
    opts: &LimitOptions,
) -> Result<LimitEstimate> {
    let mut samples = Vec::new();
    for y in grid.values() {
        let value = sampler(y)?;
        samples.push((y, value / Complex64::new(0.0, y)));
    }
    Ok(estimate_limit(&samples, opts))
}

/// Distance from `w` to the slit `(-inf, 0]`.
fn slit_distance(w: Complex64) -> f64 {
    if w.re <= 0.0 {
        w.im.abs()
    } else {
        w.norm()
    }
}

/// Outcome of the square-root conformality test at the boundary fixed point.
#[derive(Clone, Debug)]
pub struct SqrtConformality {
    pub verdict: CriterionVerdict,
    /// Limit of `i sqrt(h(iy)) / (iy)`.
    pub ratio_limit: LimitEstimate,
    /// `i / L'`, the escape constant predicted from the chart.
    pub predicted_rate: Option<Complex64>,
    /// The same data read through the raw square root, `lim sqrt(h(iy))/(iy)`
    /// and `i` times its inverse. It differs from `predicted_rate` by a
    /// unimodular factor; both readings are reported, not reconciled.
    pub raw_sqrt_ratio: Option<Complex64>,
    pub predicted_rate_raw_sqrt: Option<Complex64>,
    pub min_slit_distance: f64,
}

/// Test whether `sqrt(h)` has a finite non-zero angular derivative at
/// infinity, predicting the escape constant when it does.
///
/// Sampled h-values must stay off the slit `(-inf, 0]`; a sample landing on
/// it is a chart violation and aborts with a diagnostic rather than picking
/// a branch silently.
pub fn sqrt_conformality(
    chart: &KoenigsChart<'_>,
    grid: &GeometricGrid,
    opts: &LimitOptions,
) -> Result<SqrtConformality> {
    if chart.kind != ChartKind::Parabolic {
        return Err(Error::NotParabolic(chart.triplet.alpha));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut samples = Vec::new();
    let mut min_slit = f64::INFINITY;
    for y in grid.values() {
        let z = Complex64::new(0.0, y);
        let h = chart.eval(z)?;
        let rel_dist = slit_distance(h) / (1.0 + h.norm());
        min_slit = min_slit.min(rel_dist);
        if rel_dist < SLIT_GUARD {
            return Err(Error::ChartViolation { z, value: h });
        }
        samples.push((y, i * h.sqrt() / z));
    }
    let ratio_limit = estimate_limit(&samples, opts);
    let (verdict, predicted_rate) = if ratio_limit.converged_nonzero(opts.zero_floor) {
        let l = ratio_limit.value.finite().unwrap();
        (CriterionVerdict::Yes, Some(i / l))
    } else if ratio_limit.converged || ratio_limit.is_divergent() {
        // Converged to zero, or |h| grows faster than quadratically.
        (CriterionVerdict::No, None)
    } else {
        (CriterionVerdict::Undetermined, None)
    };
    // sqrt(h) = -i * (i sqrt(h)), so the raw-root reading follows directly.
    let raw_sqrt_ratio = ratio_limit.value.finite().map(|l| -i * l);
    let predicted_rate_raw_sqrt = match (verdict, raw_sqrt_ratio) {
        (CriterionVerdict::Yes, Some(raw)) => Some(i / raw),
        _ => None,
    };
    Ok(SqrtConformality {
        verdict,
        ratio_limit,
        predicted_rate,
        raw_sqrt_ratio,
        predicted_rate_raw_sqrt,
        min_slit_distance: min_slit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol * (1.0 + b.norm()),
            "{a} != {b} (tol {tol:e})"
        );
    }

    #[test]
    fn parabolic_chart_of_inverse_family_is_quadratic() {
        let m = 0.8;
        let triplet = HerglotzTriplet::inverse(m).unwrap();
        let z0 = c(0.0, 1.0);
        let chart = KoenigsChart::parabolic(&triplet, z0, QuadTol::default()).unwrap();
        for &z in &[c(0.0, 1.0), c(1.0, 2.0), c(-0.5, 0.25), c(3.0, 4.0)] {
            let got = chart.eval(z).unwrap();
            let want = Complex64::new(1.0, 0.0) - (z * z - z0 * z0) / (2.0 * m);
            assert_close(got, want, 1e-11);
        }
    }

    #[test]
    fn parabolic_chart_of_two_atom_family() {
        let triplet = HerglotzTriplet::two_atom().unwrap();
        let z0 = c(0.0, 1.0);
        let chart = KoenigsChart::parabolic(&triplet, z0, QuadTol::default()).unwrap();
        for &z in &[c(0.5, 1.5), c(-1.0, 0.5), c(0.0, 10.0)] {
            let got = chart.eval(z).unwrap();
            let want = Complex64::new(1.0, 0.0) + 0.5 * (z / z0).ln() - (z * z - z0 * z0) / 4.0;
            assert_close(got, want, 1e-10);
        }
    }

    #[test]
    fn parabolic_chart_of_constant_drift_is_affine() {
        let triplet = HerglotzTriplet::constant(2.0).unwrap();
        let z0 = c(0.5, 1.0);
        let chart = KoenigsChart::parabolic(&triplet, z0, QuadTol::default()).unwrap();
        let z = c(-1.0, 3.0);
        let got = chart.eval(z).unwrap();
        assert_close(got, Complex64::new(1.0, 0.0) + (z - z0) / 2.0, 1e-12);
    }

    #[test]
    fn hyperbolic_chart_of_linear_family_is_a_rotation_of_identity() {
        let triplet = HerglotzTriplet::linear(1.5).unwrap();
        let z0 = c(0.0, 2.0);
        let chart = KoenigsChart::hyperbolic(&triplet, z0, QuadTol::default()).unwrap();
        assert_close(chart.eval(z0).unwrap(), c(0.0, 1.0), 1e-13);
        for &z in &[c(1.0, 1.0), c(0.0, 5.0), c(-2.0, 0.5)] {
            let got = chart.eval(z).unwrap();
            let want = c(0.0, 1.0) * z / z0;
            assert_close(got, want, 1e-11);
        }
    }

    #[test]
    fn chart_is_path_independent() {
        let triplet = HerglotzTriplet::two_atom().unwrap();
        let chart = KoenigsChart::parabolic(&triplet, c(0.0, 1.0), QuadTol::default()).unwrap();
        let z = c(2.0, 3.0);
        let direct = chart.eval(z).unwrap();
        let detour1 = chart.eval_via(z, &[c(-1.0, 2.0)]).unwrap();
        let detour2 = chart.eval_via(z, &[c(0.0, 6.0), c(2.5, 5.0)]).unwrap();
        assert_close(detour1, direct, 1e-9);
        assert_close(detour2, direct, 1e-9);
    }

    #[test]
    fn derivative_identity_parabolic() {
        // h'(z) G(z) = 1, with h' from central differences.
        let cases = [
            HerglotzTriplet::inverse(0.5).unwrap(),
            HerglotzTriplet::two_atom().unwrap(),
            HerglotzTriplet::constant(1.0).unwrap(),
        ];
        let delta = 1e-3;
        for triplet in &cases {
            let chart = KoenigsChart::parabolic(triplet, c(0.0, 1.0), QuadTol::default()).unwrap();
            for &z in &[c(0.4, 1.2), c(-1.0, 2.0)] {
                let hp = (chart.eval(z + delta).unwrap() - chart.eval(z - delta).unwrap())
                    / (2.0 * delta);
                let g = triplet.eval(z, &QuadTol::default()).unwrap();
                assert_close(hp * g, c(1.0, 0.0), 1e-6);
            }
        }
    }

    #[test]
    fn derivative_identity_hyperbolic() {
        // h'(z) G(z) = lambda h(z).
        let lambda = 0.75;
        let triplet = HerglotzTriplet::linear(lambda).unwrap();
        let chart = KoenigsChart::hyperbolic(&triplet, c(0.0, 1.0), QuadTol::default()).unwrap();
        let delta = 1e-3;
        for &z in &[c(0.4, 1.2), c(-1.0, 2.0), c(2.0, 0.5)] {
            let hp =
                (chart.eval(z + delta).unwrap() - chart.eval(z - delta).unwrap()) / (2.0 * delta);
            let g = triplet.eval(z, &QuadTol::default()).unwrap();
            let h = chart.eval(z).unwrap();
            assert_close(hp * g, lambda * h, 1e-6);
        }
    }

    #[test]
    fn abel_residual_vanishes_at_zero_time() {
        let triplet = HerglotzTriplet::inverse(0.5).unwrap();
        let chart = KoenigsChart::parabolic(&triplet, c(0.0, 1.0), QuadTol::default()).unwrap();
        let res = abel_residual(&chart, c(0.0, 1.0), 0.0, &FlowConfig::default()).unwrap();
        assert!(res <= 1e-12);
    }

    #[test]
    fn abel_residual_small_along_flows() {
        let cfg = FlowConfig::default();
        let cases: [(HerglotzTriplet, f64); 2] = [
            (HerglotzTriplet::inverse(0.5).unwrap(), 1e-8),
            (HerglotzTriplet::two_atom().unwrap(), 1e-7),
        ];
        for (triplet, tol) in &cases {
            let chart = KoenigsChart::parabolic(triplet, c(0.0, 1.0), QuadTol::default()).unwrap();
            let res = abel_residual(&chart, c(0.0, 1.0), 10.0, &cfg).unwrap();
            assert!(res <= *tol, "residual {res:.3e} for {triplet:?}");
        }
    }

    #[test]
    fn schroeder_residual_small_for_linear_flow() {
        let triplet = HerglotzTriplet::linear(1.0).unwrap();
        let chart = KoenigsChart::hyperbolic(&triplet, c(0.0, 1.0), QuadTol::default()).unwrap();
        let cfg = FlowConfig::default();
        assert!(schroeder_residual(&chart, c(0.0, 2.0), 1.0, &cfg).unwrap() <= 1e-8);
        assert!(schroeder_residual(&chart, c(0.0, 2.0), 0.0, &cfg).unwrap() <= 1e-12);
    }

    #[test]
    fn angular_ratio_of_identity_is_one() {
        let grid = GeometricGrid::ray();
        let est = angular_ratio_limit(
            |y| Ok(Complex64::new(0.0, y)),
            &grid,
            &LimitOptions::default(),
        )
        .unwrap();
        assert!(est.converged);
        assert_close(est.value.finite().unwrap(), c(1.0, 0.0), 1e-12);
    }

    #[test]
    fn angular_ratio_of_minus_z_squared_diverges() {
        let grid = GeometricGrid::ray();
        let est = angular_ratio_limit(
            |y| {
                let z = Complex64::new(0.0, y);
                Ok(-z * z)
            },
            &grid,
            &LimitOptions::default(),
        )
        .unwrap();
        assert!(est.is_divergent());
    }

    #[test]
    fn angular_ratio_of_linear_chart_is_nonzero() {
        let triplet = HerglotzTriplet::linear(1.0).unwrap();
        let z0 = c(1.0, 2.0);
        let chart = KoenigsChart::hyperbolic(&triplet, z0, QuadTol::default()).unwrap();
        let grid = GeometricGrid::new(1.0, 2.0, 1e6);
        let est = angular_ratio_limit(|y| chart.eval(c(0.0, y)), &grid, &LimitOptions::default())
            .unwrap();
        assert!(est.converged);
        // h(z) = i z / z0, so h(iy)/(iy) = i/z0.
        assert_close(est.value.finite().unwrap(), c(0.0, 1.0) / z0, 1e-8);
    }

    #[test]
    fn sqrt_conformality_of_inverse_family() {
        for &m in &[0.5, 1.0, 2.0] {
            let triplet = HerglotzTriplet::inverse(m).unwrap();
            let chart = KoenigsChart::parabolic(&triplet, c(0.0, 1.0), QuadTol::default()).unwrap();
            let out =
                sqrt_conformality(&chart, &GeometricGrid::ray(), &LimitOptions::default()).unwrap();
            assert_eq!(out.verdict, CriterionVerdict::Yes, "m = {m}");
            let ratio = out.ratio_limit.value.finite().unwrap();
            assert_close(ratio, c(1.0 / (2.0 * m).sqrt(), 0.0), 1e-6);
            let rate = out.predicted_rate.unwrap();
            assert_close(rate, c(0.0, (2.0 * m).sqrt()), 1e-6);
            // The raw-root reading differs by exactly a factor of i.
            let raw_rate = out.predicted_rate_raw_sqrt.unwrap();
            assert_close(raw_rate, rate * c(0.0, 1.0), 1e-9);
        }
    }

    #[test]
    fn sqrt_conformality_of_two_atom_family() {
        let triplet = HerglotzTriplet::two_atom().unwrap();
        let chart = KoenigsChart::parabolic(&triplet, c(0.0, 1.0), QuadTol::default()).unwrap();
        let out =
            sqrt_conformality(&chart, &GeometricGrid::ray(), &LimitOptions::default()).unwrap();
        assert_eq!(out.verdict, CriterionVerdict::Yes);
        assert_close(out.predicted_rate.unwrap(), c(0.0, 2.0), 1e-5);
    }

    #[test]
    fn sqrt_conformality_rejects_drift_chart() {
        // G == 1: h(iy) ~ iy, sqrt grows like sqrt(y), ratio decays to zero.
        let triplet = HerglotzTriplet::constant(1.0).unwrap();
        let chart = KoenigsChart::parabolic(&triplet, c(0.0, 1.0), QuadTol::default()).unwrap();
        let out =
            sqrt_conformality(&chart, &GeometricGrid::ray(), &LimitOptions::default()).unwrap();
        assert_eq!(out.verdict, CriterionVerdict::No);
    }

    #[test]
    fn sampled_slit_hit_is_a_chart_violation() {
        // With this anchor, h(i) = 1 + (i - 5 - i) = -4 lands on the slit.
        let triplet = HerglotzTriplet::constant(1.0).unwrap();
        let chart = KoenigsChart::parabolic(&triplet, c(5.0, 1.0), QuadTol::default()).unwrap();
        let out = sqrt_conformality(&chart, &GeometricGrid::ray(), &LimitOptions::default());
        assert!(matches!(out, Err(Error::ChartViolation { .. })));
    }
}
