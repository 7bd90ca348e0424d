//! Rate-of-escape estimation from orbits, and the cross-validation gate
//! that pins the four extremality criteria against one another.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::Orbit;
use crate::generator::{CriterionVerdict, GeneratorConfig, HerglotzTriplet};
use crate::koenigs::{sqrt_conformality, KoenigsChart};
use crate::limits::{estimate_limit, GeometricGrid, LimitEstimate, LimitOptions};
use crate::quad::QuadTol;

/// Normalizer `n(t)` against which orbit escape is measured.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateNormalization {
    SqrtT,
    T,
    ExpLambda(f64),
}

impl RateNormalization {
    fn value(&self, t: f64) -> f64 {
        match *self {
            RateNormalization::SqrtT => t.sqrt(),
            RateNormalization::T => t,
            RateNormalization::ExpLambda(lambda) => (lambda * t).exp(),
        }
    }
}

/// Tail options tuned for orbit data: eight samples spanning two decades of
/// a doubling grid, with the leading 1/t error removed.
pub fn orbit_limit_options() -> LimitOptions {
    LimitOptions::with_rel_tol(1e-4).window(8).richardson(1.0)
}

/// Scaled-orbit limits: the complex ratio and its modulus.
#[derive(Clone, Debug)]
pub struct RateEstimate {
    pub complex_limit: LimitEstimate,
    pub modulus_limit: LimitEstimate,
}

impl RateEstimate {
    pub fn verdict(&self) -> CriterionVerdict {
        if self.complex_limit.is_divergent() || self.modulus_limit.is_divergent() {
            CriterionVerdict::No
        } else if self.complex_limit.converged && self.modulus_limit.converged {
            CriterionVerdict::Yes
        } else {
            CriterionVerdict::Undetermined
        }
    }
}

/// Estimate `lim phi_t / n(t)` and `lim |phi_t| / n(t)` from the orbit tail.
/// Both the modulus and the full complex sequence must settle before the
/// estimate counts as converged.
pub fn rate_estimate(orbit: &Orbit, normalization: RateNormalization) -> RateEstimate {
    let opts = orbit_limit_options();
    let mut complex_samples = Vec::new();
    let mut modulus_samples = Vec::new();
    for &(t, z) in orbit.samples.iter().filter(|&&(t, _)| t > 0.0) {
        let n = normalization.value(t);
        complex_samples.push((t, z / n));
        modulus_samples.push((t, Complex64::new(z.norm() / n, 0.0)));
    }
    RateEstimate {
        complex_limit: estimate_limit(&complex_samples, &opts),
        modulus_limit: estimate_limit(&modulus_samples, &opts),
    }
}

/// Slope estimate: the limit of `arg phi_t`.
#[derive(Clone, Debug)]
pub struct SlopeEstimate {
    pub limit: LimitEstimate,
    pub orthogonal: CriterionVerdict,
}

/// Estimate `lim arg phi_t(z)`; orthogonal convergence means the limit is
/// pi/2. Oscillating slopes stay undetermined; they are never averaged.
pub fn slope(orbit: &Orbit, tol: f64) -> SlopeEstimate {
    let opts = orbit_limit_options();
    let samples: Vec<(f64, Complex64)> = orbit
        .samples
        .iter()
        .filter(|&&(t, _)| t > 0.0)
        .map(|&(t, z)| (t, Complex64::new(z.arg(), 0.0)))
        .collect();
    let limit = estimate_limit(&samples, &opts);
    let orthogonal = match limit.value.finite() {
        Some(v) if limit.converged => {
            if (v.re - std::f64::consts::FRAC_PI_2).abs() <= tol {
                CriterionVerdict::Yes
            } else {
                CriterionVerdict::No
            }
        }
        _ => CriterionVerdict::Undetermined,
    };
    SlopeEstimate { limit, orthogonal }
}

fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Settings for the cross-validation gate.
#[derive(Clone, Debug)]
pub struct RatesConfig {
    pub quad: QuadTol,
    pub generator: GeneratorConfig,
    /// Relative tolerance for predicted-vs-measured constant agreement.
    pub agreement_rel: f64,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self {
            quad: QuadTol::default(),
            generator: GeneratorConfig::default(),
            agreement_rel: 1e-3,
        }
    }
}

/// Joint report of all four extremality criteria on one flow.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub moments: CriterionVerdict,
    pub zg: CriterionVerdict,
    pub sqrt_koenigs: CriterionVerdict,
    pub orbit_rate: CriterionVerdict,
    pub predicted_constant_moments: Option<[f64; 2]>,
    pub predicted_constant_zg: Option<[f64; 2]>,
    pub predicted_constant_sqrt: Option<[f64; 2]>,
    pub measured_rate: Option<[f64; 2]>,
    pub agreement_rel_tol: f64,
    pub verdicts_agree: bool,
    pub constants_agree: bool,
    pub consistent: bool,
    pub notes: Vec<String>,
}

/// Run the moment test, the `zG` angular limit, the square-root chart test,
/// and the measured orbit rate, and require pairwise agreement.
///
/// A disagreement between determined verdicts (or between predicted and
/// measured constants beyond tolerance) marks the report inconsistent; the
/// batch front-end turns that into a failing exit code.
pub fn cross_validate(
    triplet: &HerglotzTriplet,
    orbit: &Orbit,
    cfg: &RatesConfig,
) -> Result<ValidationReport> {
    if triplet.alpha > 0.0 {
        return Err(Error::NotParabolic(triplet.alpha));
    }
    let mut notes = Vec::new();

    let moment_crit = triplet.extremal_moment_criterion()?;
    let zg = triplet.zg_angular_limit(&cfg.generator)?;
    let chart = KoenigsChart::parabolic(triplet, orbit.z0, cfg.quad)?;
    let sqrt_out = sqrt_conformality(&chart, &GeometricGrid::ray(), &cfg.generator.limit)?;
    let rate = rate_estimate(orbit, RateNormalization::SqrtT);

    let predicted_zg = zg.rate_modulus.map(|modulus| Complex64::new(0.0, modulus));
    let measured = if rate.verdict() == CriterionVerdict::Yes {
        rate.complex_limit.value.finite()
    } else {
        None
    };

    let verdicts = [
        moment_crit.verdict,
        zg.verdict,
        sqrt_out.verdict,
        rate.verdict(),
    ];
    let mut verdicts_agree = true;
    for i in 0..verdicts.len() {
        for j in (i + 1)..verdicts.len() {
            if !verdicts[i].agrees_with(verdicts[j]) {
                verdicts_agree = false;
            }
        }
    }
    if !verdicts_agree {
        notes.push(format!(
            "verdict disagreement: moments {:?}, zG {:?}, sqrt {:?}, orbit {:?}",
            verdicts[0], verdicts[1], verdicts[2], verdicts[3]
        ));
    }

    let mut constants_agree = true;
    if let Some(measured) = measured {
        let scale = measured.norm().max(1e-12);
        for (name, predicted) in [
            ("moments", moment_crit.predicted_limit),
            ("zG", predicted_zg),
            ("sqrt chart", sqrt_out.predicted_rate),
        ] {
            if let Some(predicted) = predicted {
                let rel = (predicted - measured).norm() / scale;
                if rel > cfg.agreement_rel {
                    constants_agree = false;
                    notes.push(format!(
                        "{name} constant {predicted} vs measured {measured}: rel err {rel:.3e}"
                    ));
                }
            }
        }
    }

    let consistent = verdicts_agree && constants_agree;
    Ok(ValidationReport {
        moments: moment_crit.verdict,
        zg: zg.verdict,
        sqrt_koenigs: sqrt_out.verdict,
        orbit_rate: rate.verdict(),
        predicted_constant_moments: moment_crit.predicted_limit.map(complex_pair),
        predicted_constant_zg: predicted_zg.map(complex_pair),
        predicted_constant_sqrt: sqrt_out.predicted_rate.map(complex_pair),
        measured_rate: measured.map(complex_pair),
        agreement_rel_tol: cfg.agreement_rel,
        verdicts_agree,
        constants_agree,
        consistent,
        notes,
    })
}
