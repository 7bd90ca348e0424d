//! Infinitesimal generators of half-plane semigroups, given by a Herglotz
//! triplet `(alpha, beta, mu)`:
//!
//! ```text
//! G(z) = alpha z + beta + int (1 + s z) / (s - z) dmu(s),   Im z > 0,
//! ```
//!
//! with `alpha >= 0`, `beta` real, and `mu` a positive finite measure. The
//! module evaluates `G`, recovers the coefficients from the map itself, and
//! implements the two algebraic characterizations of the extremal escape
//! rate for parabolic flows: the moment test on `(beta, mu)` and the angular
//! limit of `z G(z)` along the imaginary ray.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{estimate_limit_of, GeometricGrid, LimitEstimate, LimitOptions, LimitValue};
use crate::measure::{Measure, Moment};
use crate::quad::QuadTol;

/// Absolute tolerance for the `beta = int s dmu` match in the moment test;
/// both sides are known to one order better.
pub const BETA_MATCH_ABS_TOL: f64 = 1e-9;

/// Herglotz data of a generator. `(0, 0, null)` denotes the zero generator
/// (identity flow) and is flagged trivial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HerglotzTriplet {
    pub alpha: f64,
    pub beta: f64,
    pub mu: Measure,
}

/// Knobs shared by the generator-side estimators.
#[derive(Clone, Debug, Default)]
pub struct GeneratorConfig {
    pub quad: QuadTol,
    pub limit: LimitOptions,
}

/// Semigroup type by spectral value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "spectral_value")]
pub enum SemigroupKind {
    Hyperbolic(f64),
    Parabolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepVerdict {
    Positive,
    Zero,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftVerdict {
    Finite,
    Infinite,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionVerdict {
    Yes,
    No,
    Undetermined,
}

impl CriterionVerdict {
    pub fn determined(self) -> bool {
        self != CriterionVerdict::Undetermined
    }

    pub fn agrees_with(self, other: CriterionVerdict) -> bool {
        !self.determined() || !other.determined() || self == other
    }
}

/// Classification of a flow: type, hyperbolic step, shift, and the verdicts
/// of the independent extremal-rate criteria.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub trivial: bool,
    pub kind: SemigroupKind,
    pub spectral_value: f64,
    pub step: StepVerdict,
    pub shift: ShiftVerdict,
    pub extremal_moments: CriterionVerdict,
    pub extremal_zg: CriterionVerdict,
    pub extremal_sqrt_koenigs: CriterionVerdict,
    /// `[re, im]` of the predicted escape constant, when one is available.
    pub predicted_rate_constant: Option<[f64; 2]>,
}

/// Outcome of recomputing `(alpha, beta)` from the map itself.
#[derive(Clone, Debug)]
pub struct CoefficientsCheck {
    pub alpha_est: f64,
    pub beta_est: f64,
    pub alpha_limit: LimitEstimate,
}

/// Moment-test outcome for parabolic triplets.
#[derive(Clone, Debug)]
pub struct MomentCriterion {
    pub verdict: CriterionVerdict,
    pub second_moment: Moment,
    pub first_moment: f64,
    pub beta_mismatch: f64,
    /// `i sqrt(2 int (1+s^2) dmu)` when the verdict is yes.
    pub predicted_limit: Option<Complex64>,
}

/// Angular-limit test outcome: the limit of `z G(z)` along `z = iy`.
#[derive(Clone, Debug)]
pub struct ZgLimit {
    pub verdict: CriterionVerdict,
    pub estimate: LimitEstimate,
    /// `sqrt(-2 lim)` when the limit is a negative real.
    pub rate_modulus: Option<f64>,
}

impl HerglotzTriplet {
    pub fn new(alpha: f64, beta: f64, mu: Measure) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidTriplet(format!(
                "alpha = {alpha} must be finite and non-negative"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidTriplet(format!(
                "beta = {beta} must be finite"
            )));
        }
        Ok(Self { alpha, beta, mu })
    }

    /// Pure linear part `G(z) = lambda z`.
    pub fn linear(lambda: f64) -> Result<Self> {
        Self::new(lambda, 0.0, Measure::null())
    }

    /// Constant drift `G(z) = c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(0.0, c, Measure::null())
    }

    /// `G(z) = -m/z` from a single atom of mass `m` at the origin.
    pub fn inverse(m: f64) -> Result<Self> {
        Self::new(0.0, 0.0, Measure::single_atom(0.0, m)?)
    }

    /// `G(z) = 2z/(1 - z^2)` from atoms of mass 1/2 at +-1.
    pub fn two_atom() -> Result<Self> {
        Self::new(0.0, 0.0, Measure::from_atoms(&[(1.0, 0.5), (-1.0, 0.5)])?)
    }

    pub fn is_trivial(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0 && self.mu.is_null()
    }

    pub fn is_parabolic(&self) -> bool {
        self.alpha == 0.0
    }

    fn require_nontrivial(&self) -> Result<()> {
        if self.is_trivial() {
            Err(Error::TrivialGenerator)
        } else {
            Ok(())
        }
    }

    fn require_parabolic(&self) -> Result<()> {
        if self.alpha > 0.0 {
            Err(Error::NotParabolic(self.alpha))
        } else {
            self.require_nontrivial()
        }
    }

    /// Evaluate `G(z)` for `Im z > 0`.
    pub fn eval(&self, z: Complex64, quad: &QuadTol) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return Err(Error::NotInHalfPlane(z));
        }
        let kernel = self.mu.integrate(|s| (1.0 + s * z) / (s - z), quad)?;
        Ok(self.alpha * z + self.beta + kernel)
    }

    /// Recompute `alpha` from `G(iy)/(iy)` along a doubling grid and `beta`
    /// from `Re G(i)`. Non-convergence of the ray limit is visible on the
    /// returned estimate.
    pub fn check_coefficients(&self, cfg: &GeneratorConfig) -> Result<CoefficientsCheck> {
        self.require_nontrivial()?;
        let quad = cfg.quad;
        let grid = GeometricGrid::ray();
        let eval_err: RefCell<Option<Error>> = RefCell::new(None);
        let alpha_limit = estimate_limit_of(
            |y| {
                let iy = Complex64::new(0.0, y);
                match self.eval(iy, &quad) {
                    Ok(g) => g / iy,
                    Err(e) => {
                        eval_err.borrow_mut().get_or_insert(e);
                        Complex64::new(f64::NAN, f64::NAN)
                    }
                }
            },
            &grid,
            &cfg.limit.richardson(1.0),
        );
        if let Some(e) = eval_err.into_inner() {
            return Err(e);
        }
        let alpha_est = match alpha_limit.value {
            LimitValue::Finite(v) => v.re,
            LimitValue::Infinite => f64::INFINITY,
        };
        let beta_est = self.eval(Complex64::new(0.0, 1.0), &quad)?.re;
        Ok(CoefficientsCheck {
            alpha_est,
            beta_est,
            alpha_limit,
        })
    }

    /// Classify from the triplet alone. The hyperbolic step is decided here
    /// only for constant generators; everything else defers to the flow-side
    /// estimators.
    pub fn classify_algebraic(&self) -> ClassificationReport {
        let trivial = self.is_trivial();
        let kind = if self.alpha > 0.0 {
            SemigroupKind::Hyperbolic(self.alpha)
        } else {
            SemigroupKind::Parabolic
        };
        let constant_drift = self.alpha == 0.0 && self.mu.is_null();
        let step = if trivial {
            StepVerdict::Undetermined
        } else if constant_drift {
            // G == beta != 0 translates horizontally at unit hyperbolic pace.
            StepVerdict::Positive
        } else {
            StepVerdict::Undetermined
        };
        let shift = if constant_drift && !trivial {
            ShiftVerdict::Finite
        } else {
            ShiftVerdict::Undetermined
        };
        ClassificationReport {
            trivial,
            kind,
            spectral_value: self.alpha,
            step,
            shift,
            extremal_moments: CriterionVerdict::Undetermined,
            extremal_zg: CriterionVerdict::Undetermined,
            extremal_sqrt_koenigs: CriterionVerdict::Undetermined,
            predicted_rate_constant: None,
        }
    }

    /// Moment test for the extremal rate of a parabolic flow: yes iff the
    /// second moment of `mu` is finite and `beta` matches the first moment.
    /// When it holds, the orbits satisfy
    /// `phi_t(z)/sqrt(t) -> i sqrt(2 int (1+s^2) dmu)`.
    pub fn extremal_moment_criterion(&self) -> Result<MomentCriterion> {
        self.require_parabolic()?;
        let second_moment = self.mu.moment(2)?;
        let first_moment = self.mu.moment(1)?.finite().expect("first moment is finite");
        let beta_mismatch = (self.beta - first_moment).abs();
        match second_moment {
            Moment::Infinite => Ok(MomentCriterion {
                verdict: CriterionVerdict::No,
                second_moment,
                first_moment,
                beta_mismatch,
                predicted_limit: None,
            }),
            Moment::Finite(m2) => {
                if beta_mismatch <= BETA_MATCH_ABS_TOL {
                    let total = self.mu.mass() + m2;
                    Ok(MomentCriterion {
                        verdict: CriterionVerdict::Yes,
                        second_moment,
                        first_moment,
                        beta_mismatch,
                        predicted_limit: Some(Complex64::new(0.0, (2.0 * total).sqrt())),
                    })
                } else {
                    Ok(MomentCriterion {
                        verdict: CriterionVerdict::No,
                        second_moment,
                        first_moment,
                        beta_mismatch,
                        predicted_limit: None,
                    })
                }
            }
        }
    }

    /// Angular limit of `z G(z)` along `z = iy`. The flow is of extremal
    /// rate iff the limit exists in `(-inf, 0)`; the escape modulus is then
    /// `sqrt(-2 lim)`.
    pub fn zg_angular_limit(&self, cfg: &GeneratorConfig) -> Result<ZgLimit> {
        self.require_parabolic()?;
        let quad = cfg.quad;
        let grid = GeometricGrid::ray();
        let eval_err: RefCell<Option<Error>> = RefCell::new(None);
        let estimate = estimate_limit_of(
            |y| {
                let iy = Complex64::new(0.0, y);
                match self.eval(iy, &quad) {
                    Ok(g) => iy * g,
                    Err(e) => {
                        eval_err.borrow_mut().get_or_insert(e);
                        Complex64::new(f64::NAN, f64::NAN)
                    }
                }
            },
            &grid,
            &cfg.limit.richardson(1.0),
        );
        if let Some(e) = eval_err.into_inner() {
            return Err(e);
        }
        let (verdict, rate_modulus) = match estimate.value {
            LimitValue::Infinite => (CriterionVerdict::No, None),
            LimitValue::Finite(v) if estimate.converged => {
                let real_enough = v.im.abs() <= 1e-6 * v.norm().max(1e-9);
                if real_enough && v.re < 0.0 {
                    (CriterionVerdict::Yes, Some((-2.0 * v.re).sqrt()))
                } else {
                    (CriterionVerdict::No, None)
                }
            }
            _ => (CriterionVerdict::Undetermined, None),
        };
        Ok(ZgLimit {
            verdict,
            estimate,
            rate_modulus,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::AcFamily;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cauchy_triplet() -> HerglotzTriplet {
        HerglotzTriplet::new(
            0.0,
            0.0,
            Measure::from_family(
                AcFamily::Cauchy {
                    center: 0.0,
                    scale: 1.0,
                },
                1.0,
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn atom_at_origin_gives_reciprocal_field() {
        let m = 0.7;
        let g = HerglotzTriplet::inverse(m).unwrap();
        let z = c(2.0, 3.0);
        let got = g.eval(z, &QuadTol::default()).unwrap();
        let want = -m / z;
        assert_relative_eq!(got.re, want.re, max_relative = 1e-14);
        assert_relative_eq!(got.im, want.im, max_relative = 1e-14);
    }

    #[test]
    fn pure_linear_part() {
        let g = HerglotzTriplet::linear(2.0).unwrap();
        let z = c(-1.0, 0.5);
        assert_eq!(g.eval(z, &QuadTol::default()).unwrap(), 2.0 * z);
    }

    #[test]
    fn symmetric_atoms_give_rational_field() {
        let g = HerglotzTriplet::two_atom().unwrap();
        for &z in &[c(0.3, 1.0), c(-2.0, 0.25), c(0.0, 5.0)] {
            let got = g.eval(z, &QuadTol::default()).unwrap();
            let want = 2.0 * z / (1.0 - z * z);
            assert_relative_eq!(got.re, want.re, max_relative = 1e-13, epsilon = 1e-14);
            assert_relative_eq!(got.im, want.im, max_relative = 1e-13, epsilon = 1e-14);
        }
    }

    #[test]
    fn standard_cauchy_measure_gives_constant_i() {
        let g = cauchy_triplet();
        for &z in &[c(0.0, 1.0), c(0.0, 2.0), c(1.0, 1.0), c(-3.0, 0.5)] {
            let got = g.eval(z, &QuadTol::default()).unwrap();
            assert_relative_eq!(got.re, 0.0, epsilon = 1e-9);
            assert_relative_eq!(got.im, 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn lower_half_plane_is_rejected() {
        let g = HerglotzTriplet::linear(1.0).unwrap();
        assert!(g.eval(c(0.0, -1.0), &QuadTol::default()).is_err());
        assert!(g.eval(c(1.0, 0.0), &QuadTol::default()).is_err());
    }

    #[test]
    fn generator_maps_into_closed_half_plane() {
        let triplets = [
            HerglotzTriplet::linear(0.5).unwrap(),
            HerglotzTriplet::constant(1.0).unwrap(),
            HerglotzTriplet::inverse(1.0).unwrap(),
            HerglotzTriplet::two_atom().unwrap(),
            cauchy_triplet(),
            HerglotzTriplet::new(
                0.3,
                -0.7,
                Measure::from_family(
                    AcFamily::Gaussian {
                        mean: 1.0,
                        sigma: 0.5,
                    },
                    2.0,
                )
                .unwrap(),
            )
            .unwrap(),
        ];
        for g in &triplets {
            for kx in -3..=3 {
                for ky in 0..4 {
                    let z = c(0.8 * kx as f64, 0.3 * 3f64.powi(ky));
                    let val = g.eval(z, &QuadTol::default()).unwrap();
                    assert!(val.im >= -1e-12, "Im G({z}) = {} < 0 for {g:?}", val.im);
                }
            }
        }
    }

    #[test]
    fn coefficients_recovered_for_linear() {
        let g = HerglotzTriplet::linear(1.5).unwrap();
        let chk = g.check_coefficients(&GeneratorConfig::default()).unwrap();
        assert!(chk.alpha_limit.converged);
        assert_relative_eq!(chk.alpha_est, 1.5, max_relative = 1e-6);
        assert_relative_eq!(chk.beta_est, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn coefficients_recovered_for_two_atom() {
        let g = HerglotzTriplet::two_atom().unwrap();
        let chk = g.check_coefficients(&GeneratorConfig::default()).unwrap();
        assert!(chk.alpha_limit.converged);
        assert!(chk.alpha_est.abs() <= 1e-6);
        assert!(chk.beta_est.abs() <= 1e-9);
    }

    #[test]
    fn coefficients_recovered_with_drift_and_atom() {
        let beta0 = -0.4;
        let g = HerglotzTriplet::new(0.0, beta0, Measure::single_atom(0.0, 0.9).unwrap()).unwrap();
        let chk = g.check_coefficients(&GeneratorConfig::default()).unwrap();
        assert!(chk.alpha_est.abs() <= 1e-6);
        assert_relative_eq!(chk.beta_est, beta0, max_relative = 1e-9);
    }

    #[test]
    fn coefficients_recovered_across_the_triplet_zoo() {
        let cfg = GeneratorConfig::default();
        let triplets = [
            HerglotzTriplet::linear(0.5).unwrap(),
            HerglotzTriplet::constant(1.0).unwrap(),
            HerglotzTriplet::inverse(2.0).unwrap(),
            HerglotzTriplet::two_atom().unwrap(),
            cauchy_triplet(),
            HerglotzTriplet::new(
                1.25,
                -0.75,
                Measure::from_family(
                    AcFamily::Gaussian {
                        mean: 0.5,
                        sigma: 1.0,
                    },
                    0.5,
                )
                .unwrap(),
            )
            .unwrap(),
        ];
        for g in &triplets {
            let chk = g.check_coefficients(&cfg).unwrap();
            let alpha_err = (chk.alpha_est - g.alpha).abs() / g.alpha.max(1.0);
            let beta_err = (chk.beta_est - g.beta).abs() / g.beta.abs().max(1.0);
            assert!(alpha_err <= 1e-6, "alpha for {g:?}: {}", chk.alpha_est);
            assert!(beta_err <= 1e-6, "beta for {g:?}: {}", chk.beta_est);
        }
    }

    #[test]
    fn classification_by_spectral_value() {
        let hyp = HerglotzTriplet::linear(2.0).unwrap().classify_algebraic();
        assert_eq!(hyp.kind, SemigroupKind::Hyperbolic(2.0));
        assert_eq!(hyp.spectral_value, 2.0);

        let drift = HerglotzTriplet::constant(1.0).unwrap().classify_algebraic();
        assert_eq!(drift.kind, SemigroupKind::Parabolic);
        assert_eq!(drift.step, StepVerdict::Positive);
        assert_eq!(drift.shift, ShiftVerdict::Finite);

        let atom = HerglotzTriplet::inverse(1.0).unwrap().classify_algebraic();
        assert_eq!(atom.kind, SemigroupKind::Parabolic);
        assert_eq!(atom.step, StepVerdict::Undetermined);

        let trivial = HerglotzTriplet::new(0.0, 0.0, Measure::null())
            .unwrap()
            .classify_algebraic();
        assert!(trivial.trivial);
    }

    #[test]
    fn moment_test_accepts_origin_atom() {
        let m = 0.5;
        let g = HerglotzTriplet::inverse(m).unwrap();
        let crit = g.extremal_moment_criterion().unwrap();
        assert_eq!(crit.verdict, CriterionVerdict::Yes);
        let lim = crit.predicted_limit.unwrap();
        assert_relative_eq!(lim.im, (2.0 * m).sqrt(), max_relative = 1e-14);
        assert_eq!(lim.re, 0.0);
    }

    #[test]
    fn moment_test_accepts_symmetric_atoms() {
        let g = HerglotzTriplet::two_atom().unwrap();
        let crit = g.extremal_moment_criterion().unwrap();
        assert_eq!(crit.verdict, CriterionVerdict::Yes);
        let lim = crit.predicted_limit.unwrap();
        // int (1+s^2) dmu = 2, so the constant is 2i.
        assert_relative_eq!(lim.im, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn moment_test_rejects_heavy_tails() {
        let crit = cauchy_triplet().extremal_moment_criterion().unwrap();
        assert_eq!(crit.verdict, CriterionVerdict::No);
        assert_eq!(crit.second_moment, Moment::Infinite);
    }

    #[test]
    fn moment_test_rejects_mismatched_drift() {
        let g = HerglotzTriplet::new(0.0, 1.0, Measure::single_atom(0.0, 1.0).unwrap()).unwrap();
        let crit = g.extremal_moment_criterion().unwrap();
        assert_eq!(crit.verdict, CriterionVerdict::No);
        assert_relative_eq!(crit.beta_mismatch, 1.0);
    }

    #[test]
    fn moment_test_requires_parabolic() {
        let g = HerglotzTriplet::linear(1.0).unwrap();
        assert!(matches!(
            g.extremal_moment_criterion(),
            Err(Error::NotParabolic(_))
        ));
    }

    #[test]
    fn zg_limit_for_origin_atom_is_exact() {
        let m = 0.8;
        let g = HerglotzTriplet::inverse(m).unwrap();
        let zg = g.zg_angular_limit(&GeneratorConfig::default()).unwrap();
        assert_eq!(zg.verdict, CriterionVerdict::Yes);
        let v = zg.estimate.value.finite().unwrap();
        assert_relative_eq!(v.re, -m, max_relative = 1e-10);
        assert_relative_eq!(
            zg.rate_modulus.unwrap(),
            (2.0 * m).sqrt(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn zg_limit_for_two_atom() {
        let g = HerglotzTriplet::two_atom().unwrap();
        let zg = g.zg_angular_limit(&GeneratorConfig::default()).unwrap();
        assert_eq!(zg.verdict, CriterionVerdict::Yes);
        let v = zg.estimate.value.finite().unwrap();
        assert_relative_eq!(v.re, -2.0, max_relative = 1e-8);
        assert_relative_eq!(zg.rate_modulus.unwrap(), 2.0, max_relative = 1e-8);
    }

    #[test]
    fn zg_limit_diverges_for_constant_drift() {
        let g = HerglotzTriplet::constant(1.0).unwrap();
        let zg = g.zg_angular_limit(&GeneratorConfig::default()).unwrap();
        assert_eq!(zg.verdict, CriterionVerdict::No);
        assert!(zg.estimate.is_divergent());
    }

    #[test]
    fn zg_limit_diverges_for_heavy_tails() {
        let zg = cauchy_triplet()
            .zg_angular_limit(&GeneratorConfig::default())
            .unwrap();
        assert_eq!(zg.verdict, CriterionVerdict::No);
    }

    #[test]
    fn zg_and_moment_tests_agree() {
        let triplets = [
            HerglotzTriplet::inverse(0.5).unwrap(),
            HerglotzTriplet::inverse(2.0).unwrap(),
            HerglotzTriplet::two_atom().unwrap(),
            HerglotzTriplet::constant(1.0).unwrap(),
            cauchy_triplet(),
            HerglotzTriplet::new(
                0.0,
                0.25,
                Measure::from_family(AcFamily::Uniform { a: 0.0, b: 0.5 }, 1.0).unwrap(),
            )
            .unwrap(),
        ];
        let cfg = GeneratorConfig::default();
        for g in &triplets {
            let moments = g.extremal_moment_criterion().unwrap().verdict;
            let zg = g.zg_angular_limit(&cfg).unwrap().verdict;
            assert!(
                moments.agrees_with(zg),
                "criteria disagree on {g:?}: moments {moments:?}, zg {zg:?}"
            );
        }
    }

    #[test]
    fn extremal_constants_are_consistent() {
        // -2 (zG limit) must equal 2 int (1+s^2) dmu on extremal triplets.
        let cfg = GeneratorConfig::default();
        for g in [
            HerglotzTriplet::inverse(0.5).unwrap(),
            HerglotzTriplet::inverse(1.0).unwrap(),
            HerglotzTriplet::two_atom().unwrap(),
            HerglotzTriplet::new(
                0.0,
                0.25, // matches the first moment of uniform(0, 0.5) mass 1
                Measure::from_family(AcFamily::Uniform { a: 0.0, b: 0.5 }, 1.0).unwrap(),
            )
            .unwrap(),
        ] {
            let zg = g.zg_angular_limit(&cfg).unwrap();
            let total = match g.mu.one_plus_s_squared() {
                Moment::Finite(v) => v,
                Moment::Infinite => panic!("expected finite"),
            };
            let lim = zg.estimate.value.finite().unwrap().re;
            assert_relative_eq!(-2.0 * lim, 2.0 * total, max_relative = 1e-6);
        }
    }

    #[test]
    fn uniform_drift_triplet_is_extremal_only_with_matching_beta() {
        let mu = Measure::from_family(AcFamily::Uniform { a: 0.0, b: 0.5 }, 1.0).unwrap();
        let matched = HerglotzTriplet::new(0.0, 0.25, mu.clone()).unwrap();
        assert_eq!(
            matched.extremal_moment_criterion().unwrap().verdict,
            CriterionVerdict::Yes
        );
        let mismatched = HerglotzTriplet::new(0.0, 0.5, mu).unwrap();
        assert_eq!(
            mismatched.extremal_moment_criterion().unwrap().verdict,
            CriterionVerdict::No
        );
    }

    #[test]
    fn negative_alpha_is_rejected() {
        assert!(HerglotzTriplet::new(-0.1, 0.0, Measure::null()).is_err());
    }
}
