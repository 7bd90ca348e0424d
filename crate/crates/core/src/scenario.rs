//! Scenario files and the batch pipeline: load a JSON scenario, run the
//! requested analyses, and write reports under one directory per scenario.
//!
//! Outputs are deterministic; re-running a scenario reproduces every file
//! byte for byte. Tolerances and horizon stored in the scenario file win
//! over command-line flags, so the file remains the unit of reproducibility.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{
    hyperbolic_step_estimate, integrate_orbit, shift_classify, ClosedFormFamily, FlowConfig, Orbit,
    Schedule,
};
use crate::generator::{
    ClassificationReport, CriterionVerdict, GeneratorConfig, HerglotzTriplet, SemigroupKind,
    ShiftVerdict, StepVerdict,
};
use crate::hypgeom::{total_speed_deviation, SpeedDeviationSeries, SpeedMode};
use crate::koenigs::{
    abel_residual, schroeder_residual, sqrt_conformality, ChartDump, KoenigsChart,
};
use crate::limits::{GeometricGrid, LimitOptions, LimitValue};
use crate::operators::{
    cayley_to_halfplane, conjugate_orbit, norm_growth_check, product_check, Space,
};
use crate::quad::QuadTol;
use crate::rates::{cross_validate, rate_estimate, slope, RateNormalization, RatesConfig};

/// Exponential growth caps the usable horizon for hyperbolic flows well
/// before f64 overflow at e^709 (distances square the magnitudes).
const HYPERBOLIC_EXPONENT_CAP: f64 = 300.0;

/// Tolerances carried by a scenario. Every field has the crate-wide default.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub quad_rel: f64,
    pub quad_abs: f64,
    pub ode_rtol: f64,
    pub ode_atol: f64,
    pub limit_rel: f64,
    pub agreement_rel: f64,
    pub slope_tol: f64,
    pub norm_bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_rel: crate::quad::DEFAULT_REL_TOL,
            quad_abs: crate::quad::DEFAULT_ABS_TOL,
            ode_rtol: crate::flow::DEFAULT_RTOL,
            ode_atol: crate::flow::DEFAULT_ATOL,
            limit_rel: crate::limits::DEFAULT_LIMIT_REL_TOL,
            agreement_rel: 1e-3,
            slope_tol: 1e-3,
            norm_bound: 100.0,
        }
    }
}

impl Tolerances {
    pub fn quad(&self) -> QuadTol {
        QuadTol {
            rel: self.quad_rel,
            abs: self.quad_abs,
            ..QuadTol::default()
        }
    }

    pub fn flow(&self) -> FlowConfig {
        FlowConfig {
            rtol: self.ode_rtol,
            atol: self.ode_atol,
            quad: self.quad(),
            ..FlowConfig::default()
        }
    }

    pub fn generator(&self) -> GeneratorConfig {
        GeneratorConfig {
            quad: self.quad(),
            limit: LimitOptions::with_rel_tol(self.limit_rel),
        }
    }

    pub fn rates(&self) -> RatesConfig {
        RatesConfig {
            quad: self.quad(),
            generator: self.generator(),
            agreement_rel: self.agreement_rel,
        }
    }
}

/// Requested analyses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Classify,
    Rate,
    Koenigs,
    Speed,
    Operators,
    CrossValidate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct FamilyRepr {
    kind: String,
    #[serde(default)]
    param: Option<f64>,
}

/// A scenario: the flow under study, start points, horizon, tolerances, and
/// the analyses to run. `seed` records the fixed seed used by randomized
/// property suites driven from this file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    triplet: Option<HerglotzTriplet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<FamilyRepr>,
    pub start_points: Vec<(f64, f64)>,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tau: Option<(f64, f64)>,
}

/// Series output format for orbit/speed/operator tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Scenario(format!(
                "unknown format {other:?}, expected csv or json"
            ))),
        }
    }

    fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Defaults a caller may supply for fields the scenario leaves unset.
#[derive(Clone, Debug, Default)]
pub struct RunOverrides {
    pub horizon: Option<f64>,
    pub limit_rel: Option<f64>,
}

/// What a run produced.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub name: String,
    pub out_dir: PathBuf,
    pub outputs: Vec<String>,
    /// False when cross-validation found a disagreement.
    pub consistent: bool,
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let scenario: Scenario = serde_json::from_str(&text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != 1 {
            return Err(Error::Scenario(format!(
                "unsupported schema version {} (expected 1)",
                self.schema
            )));
        }
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(Error::Scenario(format!(
                "scenario name {:?} must be non-empty and use only [A-Za-z0-9_-]",
                self.name
            )));
        }
        match (&self.triplet, &self.family) {
            (Some(_), Some(_)) => {
                return Err(Error::Scenario(
                    "give either a triplet or a family tag, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Scenario(
                    "scenario needs a triplet or a family tag".into(),
                ))
            }
            _ => {}
        }
        self.resolve_triplet()?;
        if !self.start_points.iter().any(|&(_, im)| im > 0.0) {
            return Err(Error::Scenario(
                "at least one start point must lie in the upper half-plane".into(),
            ));
        }
        if let Some(h) = self.horizon {
            if !(h >= 1.0) {
                return Err(Error::Scenario(format!("horizon {h} must be >= 1")));
            }
        }
        Ok(())
    }

    pub fn resolve_triplet(&self) -> Result<HerglotzTriplet> {
        if let Some(t) = &self.triplet {
            return HerglotzTriplet::new(t.alpha, t.beta, t.mu.clone());
        }
        let family = self.family.as_ref().expect("validated");
        let fam = match (family.kind.as_str(), family.param) {
            ("linear", Some(lambda)) => ClosedFormFamily::Linear { lambda },
            ("constant", Some(c)) => ClosedFormFamily::Constant { c },
            ("inverse", Some(m)) => ClosedFormFamily::Inverse { m },
            ("two_atom", _) => ClosedFormFamily::TwoAtom,
            (kind, param) => {
                return Err(Error::Scenario(format!(
                    "unknown family {kind:?} with param {param:?}"
                )))
            }
        };
        fam.triplet()
    }

    pub fn start_points(&self) -> Vec<Complex64> {
        self.start_points
            .iter()
            .filter(|&&(_, im)| im > 0.0)
            .map(|&(re, im)| Complex64::new(re, im))
            .collect()
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
            .map(|(re, im)| Complex64::new(re, im))
            .unwrap_or(Complex64::new(1.0, 0.0))
    }
}

#[derive(Serialize)]
struct ClassifyOutput {
    report: ClassificationReport,
    alpha_est: f64,
    beta_est: f64,
    hyperbolic_step_last: Option<f64>,
    sup_im: Option<f64>,
    criteria_agree: bool,
}

#[derive(Serialize)]
struct RateOutput {
    start: [f64; 2],
    mode: String,
    converged: bool,
    divergent: bool,
    value: Option<[f64; 2]>,
    modulus: Option<f64>,
    slope: Option<f64>,
    orthogonal: CriterionVerdict,
}

#[derive(Serialize)]
struct KoenigsOutput {
    chart: ChartDump,
    residual_kind: String,
    residuals: Vec<(f64, f64)>,
    max_residual: f64,
    sqrt_verdict: Option<CriterionVerdict>,
    predicted_rate: Option<[f64; 2]>,
    predicted_rate_raw_sqrt: Option<[f64; 2]>,
}

#[derive(Serialize)]
struct SpeedOutput {
    mode: String,
    verdict: String,
    limit: Option<f64>,
}

#[derive(Serialize)]
struct OperatorsOutput {
    tau: [f64; 2],
    product_limit: Option<f64>,
    product_converged: bool,
    growth_verdicts: Vec<(String, f64, String)>,
}

struct Runner<'a> {
    scenario: &'a Scenario,
    triplet: HerglotzTriplet,
    tols: Tolerances,
    horizon: f64,
    dir: PathBuf,
    format: OutputFormat,
    outputs: Vec<String>,
    consistent: bool,
    orbit_cache: Option<Orbit>,
    classification: Option<ClassificationReport>,
}

impl<'a> Runner<'a> {
    fn effective_horizon(&self) -> f64 {
        if self.triplet.alpha > 0.0 {
            self.horizon
                .min(HYPERBOLIC_EXPONENT_CAP / self.triplet.alpha)
        } else {
            self.horizon
        }
    }

    fn primary_start(&self) -> Complex64 {
        self.scenario.start_points()[0]
    }

    fn orbit(&mut self) -> Result<Orbit> {
        if self.orbit_cache.is_none() {
            let orbit = integrate_orbit(
                &self.triplet,
                self.primary_start(),
                &Schedule::geometric(self.effective_horizon()),
                &self.tols.flow(),
            )?;
            self.orbit_cache = Some(orbit);
        }
        Ok(self.orbit_cache.clone().expect("cached"))
    }

    fn write_json<T: Serialize>(&mut self, file: &str, value: &T) -> Result<()> {
        let path = self.dir.join(file);
        let mut buf = serde_json::to_vec_pretty(value)?;
        buf.push(b'\n');
        fs::write(&path, buf)?;
        self.outputs.push(file.to_string());
        Ok(())
    }

    fn write_series(&mut self, stem: &str, header: &str, rows: &[Vec<f64>]) -> Result<()> {
        let file = format!("{stem}.{}", self.format.extension());
        let path = self.dir.join(&file);
        match self.format {
            OutputFormat::Csv => {
                let mut out = Vec::new();
                writeln!(out, "{header}")?;
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
                fs::write(&path, out)?;
            }
            OutputFormat::Json => {
                let table = serde_json::json!({
                    "columns": header.split(',').collect::<Vec<_>>(),
                    "rows": rows,
                });
                let mut buf = serde_json::to_vec_pretty(&table)?;
                buf.push(b'\n');
                fs::write(&path, buf)?;
            }
        }
        self.outputs.push(file);
        Ok(())
    }

    fn classification(&mut self) -> Result<ClassificationReport> {
        if let Some(r) = &self.classification {
            return Ok(r.clone());
        }
        let mut report = self.triplet.classify_algebraic();
        if !report.trivial {
            let orbit = self.orbit()?;
            if report.step == StepVerdict::Undetermined {
                report.step =
                    hyperbolic_step_estimate(&orbit, &self.triplet, &self.tols.flow())?.verdict;
            }
            if report.shift == ShiftVerdict::Undetermined {
                report.shift = shift_classify(&orbit, &self.tols.flow()).verdict;
            }
            if self.triplet.is_parabolic() {
                let moments = self.triplet.extremal_moment_criterion()?;
                let zg = self.triplet.zg_angular_limit(&self.tols.generator())?;
                let chart = KoenigsChart::parabolic(&self.triplet, orbit.z0, self.tols.quad())?;
                let sqrt_out =
                    sqrt_conformality(&chart, &GeometricGrid::ray(), &self.tols.generator().limit)?;
                report.extremal_moments = moments.verdict;
                report.extremal_zg = zg.verdict;
                report.extremal_sqrt_koenigs = sqrt_out.verdict;
                report.predicted_rate_constant = moments
                    .predicted_limit
                    .or(sqrt_out.predicted_rate)
                    .or(zg.rate_modulus.map(|m| Complex64::new(0.0, m)))
                    .map(|v| [v.re, v.im]);
            }
        }
        self.classification = Some(report.clone());
        Ok(report)
    }

    fn run_classify(&mut self) -> Result<()> {
        let report = self.classification()?;
        let (alpha_est, beta_est) = if report.trivial {
            (0.0, 0.0)
        } else {
            let chk = self.triplet.check_coefficients(&self.tols.generator())?;
            (chk.alpha_est, chk.beta_est)
        };
        let (step_last, sup_im) = if report.trivial {
            (None, None)
        } else {
            let orbit = self.orbit()?;
            let step = hyperbolic_step_estimate(&orbit, &self.triplet, &self.tols.flow())?;
            let shift = shift_classify(&orbit, &self.tols.flow());
            (Some(step.last_value), Some(shift.sup_im))
        };
        let verdicts = [
            report.extremal_moments,
            report.extremal_zg,
            report.extremal_sqrt_koenigs,
        ];
        let mut criteria_agree = true;
        for i in 0..verdicts.len() {
            for j in (i + 1)..verdicts.len() {
                criteria_agree &= verdicts[i].agrees_with(verdicts[j]);
            }
        }
        if !criteria_agree {
            self.consistent = false;
        }
        let out = ClassifyOutput {
            report,
            alpha_est,
            beta_est,
            hyperbolic_step_last: step_last,
            sup_im,
            criteria_agree,
        };
        self.write_json("classification.json", &out)
    }

    fn run_rate(&mut self) -> Result<()> {
        let kind = self.classification()?.kind;
        let mut entries = Vec::new();
        for (idx, z0) in self.scenario.start_points().into_iter().enumerate() {
            let orbit = if idx == 0 {
                self.orbit()?
            } else {
                integrate_orbit(
                    &self.triplet,
                    z0,
                    &Schedule::geometric(self.effective_horizon()),
                    &self.tols.flow(),
                )?
            };
            let rows: Vec<Vec<f64>> = orbit
                .samples
                .iter()
                .map(|&(t, z)| vec![t, z.re, z.im, z.norm(), z.arg()])
                .collect();
            self.write_series(&format!("orbit_{idx}"), "t,re,im,abs,arg", &rows)?;

            let modes: Vec<(String, RateNormalization)> = match kind {
                SemigroupKind::Hyperbolic(lambda) => {
                    vec![("exp_lambda".into(), RateNormalization::ExpLambda(lambda))]
                }
                SemigroupKind::Parabolic => vec![
                    ("sqrt_t".into(), RateNormalization::SqrtT),
                    ("t".into(), RateNormalization::T),
                ],
            };
            let slope_est = slope(&orbit, self.tols.slope_tol);
            for (mode, normalization) in modes {
                let est = rate_estimate(&orbit, normalization);
                entries.push(RateOutput {
                    start: [z0.re, z0.im],
                    mode,
                    converged: est.complex_limit.converged && est.modulus_limit.converged,
                    divergent: est.complex_limit.is_divergent(),
                    value: est.complex_limit.value.finite().map(|v| [v.re, v.im]),
                    modulus: est.modulus_limit.value.finite().map(|v| v.re),
                    slope: slope_est.limit.value.finite().map(|v| v.re),
                    orthogonal: slope_est.orthogonal,
                });
            }
        }
        self.write_json("rate.json", &entries)
    }

    fn run_koenigs(&mut self) -> Result<()> {
        let z0 = self.primary_start();
        let quad = self.tols.quad();
        let flow_cfg = self.tols.flow();
        let t_grid: Vec<f64> = [0.0, 1.0, 10.0, 100.0]
            .into_iter()
            .filter(|&t| t <= self.effective_horizon())
            .collect();
        let out = if self.triplet.alpha > 0.0 {
            let chart = KoenigsChart::hyperbolic(&self.triplet, z0, quad)?;
            let mut residuals = Vec::new();
            for &t in &t_grid {
                residuals.push((t, schroeder_residual(&chart, z0, t, &flow_cfg)?));
            }
            let max_residual = residuals.iter().map(|&(_, r)| r).fold(0.0, f64::max);
            KoenigsOutput {
                chart: chart.dump(None),
                residual_kind: "schroeder".into(),
                residuals,
                max_residual,
                sqrt_verdict: None,
                predicted_rate: None,
                predicted_rate_raw_sqrt: None,
            }
        } else {
            let chart = KoenigsChart::parabolic(&self.triplet, z0, quad)?;
            let mut residuals = Vec::new();
            for &t in &t_grid {
                residuals.push((t, abel_residual(&chart, z0, t, &flow_cfg)?));
            }
            let max_residual = residuals.iter().map(|&(_, r)| r).fold(0.0, f64::max);
            let sqrt_out =
                sqrt_conformality(&chart, &GeometricGrid::ray(), &self.tols.generator().limit)?;
            KoenigsOutput {
                chart: chart.dump(Some(sqrt_out.min_slit_distance)),
                residual_kind: "abel".into(),
                residuals,
                max_residual,
                sqrt_verdict: Some(sqrt_out.verdict),
                predicted_rate: sqrt_out.predicted_rate.map(|v| [v.re, v.im]),
                predicted_rate_raw_sqrt: sqrt_out.predicted_rate_raw_sqrt.map(|v| [v.re, v.im]),
            }
        };
        self.write_json("koenigs.json", &out)
    }

    fn run_speed(&mut self) -> Result<()> {
        let report = self.classification()?;
        let mode = match report.kind {
            SemigroupKind::Hyperbolic(lambda) => SpeedMode::Hyperbolic(lambda),
            SemigroupKind::Parabolic => match report.step {
                StepVerdict::Positive => SpeedMode::PositiveStep,
                _ => SpeedMode::ZeroStep,
            },
        };
        let orbit = self.orbit()?;
        let series: SpeedDeviationSeries = total_speed_deviation(&orbit, mode)?;
        let rows: Vec<Vec<f64>> = series.points.iter().map(|&(t, d)| vec![t, d]).collect();
        self.write_series("speed_0", "t,deviation", &rows)?;
        let verdict = if series.limit.converged {
            "converges"
        } else if series.limit.value.is_infinite() {
            "diverges"
        } else {
            "undetermined"
        };
        let mode_name = match mode {
            SpeedMode::ZeroStep => "zero_step".to_string(),
            SpeedMode::PositiveStep => "positive_step".to_string(),
            SpeedMode::Hyperbolic(lambda) => format!("hyperbolic lambda={lambda}"),
        };
        let out = SpeedOutput {
            mode: mode_name,
            verdict: verdict.into(),
            limit: match series.limit.value {
                LimitValue::Finite(v) if series.limit.converged => Some(v.re),
                _ => None,
            },
        };
        self.write_json("speed.json", &out)
    }

    fn run_operators(&mut self) -> Result<()> {
        let tau = self.scenario.tau();
        // Norm envelopes are driven by |psi_t(0)|, so the disc orbit starts
        // at the disc's center regardless of the scenario start points.
        let w0 = cayley_to_halfplane(tau, Complex64::new(0.0, 0.0))?;
        let orbit = integrate_orbit(
            &self.triplet,
            w0,
            &Schedule::geometric(self.effective_horizon()),
            &self.tols.flow(),
        )?;
        let disc = conjugate_orbit(&orbit, tau)?;
        let product = product_check(&disc, &orbit);

        let mut growth_verdicts = Vec::new();
        let mut canonical_rows: Vec<Vec<f64>> = Vec::new();
        for space in [Space::Hardy, Space::Bergman] {
            for p in [1.0, 2.0, 4.0] {
                let growth = norm_growth_check(&disc, p, space, self.tols.norm_bound)?;
                if space == Space::Hardy && p == 2.0 {
                    canonical_rows = growth
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.t,
                                r.one_minus_abs_psi,
                                r.envelope_lower,
                                r.envelope_upper,
                                r.ratio_lower,
                                r.ratio_upper,
                            ]
                        })
                        .collect();
                }
                growth_verdicts.push((
                    format!("{space:?}").to_lowercase(),
                    p,
                    format!("{:?}", growth.verdict).to_lowercase(),
                ));
            }
        }
        self.write_series(
            "operators_hardy_p2",
            "t,one_minus_abs_psi,envelope_lower,envelope_upper,ratio_lower,ratio_upper",
            &canonical_rows,
        )?;
        let out = OperatorsOutput {
            tau: [tau.re, tau.im],
            product_limit: product.limit.value.finite().map(|v| v.re),
            product_converged: product.limit.converged,
            growth_verdicts,
        };
        self.write_json("operators.json", &out)
    }

    fn run_cross_validate(&mut self) -> Result<()> {
        let orbit = self.orbit()?;
        let report = cross_validate(&self.triplet, &orbit, &self.tols.rates())?;
        if !report.consistent {
            self.consistent = false;
        }
        self.write_json("validation.json", &report)
    }
}

/// Run a scenario, writing all outputs under `<out_root>/<scenario name>/`.
pub fn run(
    scenario: &Scenario,
    out_root: &Path,
    format: OutputFormat,
    overrides: &RunOverrides,
) -> Result<RunReport> {
    scenario.validate()?;
    let triplet = scenario.resolve_triplet()?;
    let mut tols = scenario.tolerances.clone().unwrap_or_else(|| {
        let mut t = Tolerances::default();
        if let Some(rel) = overrides.limit_rel {
            t.limit_rel = rel;
        }
        t
    });
    // Guard against nonsensical overrides landing in the quadrature.
    if !(tols.quad_rel > 0.0 && tols.limit_rel > 0.0) {
        return Err(Error::Scenario("tolerances must be positive".into()));
    }
    if tols.slope_tol <= 0.0 {
        tols.slope_tol = Tolerances::default().slope_tol;
    }
    let horizon = scenario.horizon.or(overrides.horizon).unwrap_or(1e8);
    if !(horizon >= 1.0) {
        return Err(Error::Scenario(format!("horizon {horizon} must be >= 1")));
    }

    let dir = out_root.join(&scenario.name);
    fs::create_dir_all(&dir)?;

    let mut runner = Runner {
        scenario,
        triplet,
        tols,
        horizon,
        dir: dir.clone(),
        format,
        outputs: Vec::new(),
        consistent: true,
        orbit_cache: None,
        classification: None,
    };
    for analysis in &scenario.analyses {
        match analysis {
            Analysis::Classify => runner.run_classify()?,
            Analysis::Rate => runner.run_rate()?,
            Analysis::Koenigs => runner.run_koenigs()?,
            Analysis::Speed => runner.run_speed()?,
            Analysis::Operators => runner.run_operators()?,
            Analysis::CrossValidate => runner.run_cross_validate()?,
        }
    }
    Ok(RunReport {
        name: scenario.name.clone(),
        out_dir: dir,
        outputs: runner.outputs,
        consistent: runner.consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inverse_scenario(analyses: Vec<Analysis>) -> Scenario {
        Scenario {
            schema: 1,
            name: "unit_inverse".into(),
            triplet: Some(HerglotzTriplet::inverse(0.5).unwrap()),
            family: None,
            start_points: vec![(0.0, 1.0)],
            horizon: Some(1e6),
            tolerances: None,
            analyses,
            seed: 7,
            tau: None,
        }
    }

    #[test]
    fn scenario_json_round_trip() {
        let text = r#"{
            "schema": 1,
            "name": "demo",
            "triplet": {"alpha": 0.0, "beta": 0.0, "mu": {"atoms": [[0.0, 0.5]], "ac": []}},
            "start_points": [[0.0, 1.0]],
            "horizon": 1e6,
            "analyses": ["classify", "rate"]
        }"#;
        let scenario: Scenario = serde_json::from_str(text).unwrap();
        scenario.validate().unwrap();
        assert_eq!(scenario.analyses.len(), 2);
        assert_eq!(scenario.resolve_triplet().unwrap().mu.mass(), 0.5);
    }

    #[test]
    fn family_tags_resolve() {
        let text = r#"{
            "schema": 1,
            "name": "fam",
            "family": {"kind": "two_atom"},
            "start_points": [[0.0, 1.0]],
            "analyses": []
        }"#;
        let scenario: Scenario = serde_json::from_str(text).unwrap();
        let triplet = scenario.resolve_triplet().unwrap();
        assert_eq!(triplet.mu.atoms().len(), 2);
    }

    #[test]
    fn bad_schema_and_names_are_rejected() {
        let mut s = inverse_scenario(vec![]);
        s.schema = 2;
        assert!(s.validate().is_err());
        let mut s = inverse_scenario(vec![]);
        s.name = "../evil".into();
        assert!(s.validate().is_err());
        let mut s = inverse_scenario(vec![]);
        s.start_points = vec![(0.0, -1.0)];
        assert!(s.validate().is_err());
    }

    #[test]
    fn empty_analyses_is_a_no_op() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = inverse_scenario(vec![]);
        let report = run(
            &scenario,
            dir.path(),
            OutputFormat::Csv,
            &RunOverrides::default(),
        )
        .unwrap();
        assert!(report.consistent);
        assert!(report.outputs.is_empty());
    }

    #[test]
    fn classify_and_speed_write_reports() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = inverse_scenario(vec![Analysis::Classify, Analysis::Speed]);
        let report = run(
            &scenario,
            dir.path(),
            OutputFormat::Csv,
            &RunOverrides::default(),
        )
        .unwrap();
        assert!(report.consistent);
        assert!(report.outputs.contains(&"classification.json".to_string()));
        assert!(report.outputs.contains(&"speed_0.csv".to_string()));
        let text = fs::read_to_string(report.out_dir.join("classification.json")).unwrap();
        assert!(text.contains("parabolic"));
        assert!(text.contains("\"extremal_moments\": \"yes\""));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let scenario = inverse_scenario(vec![Analysis::Classify, Analysis::Rate, Analysis::Speed]);
        let a = run(
            &scenario,
            dir_a.path(),
            OutputFormat::Csv,
            &RunOverrides::default(),
        )
        .unwrap();
        let b = run(
            &scenario,
            dir_b.path(),
            OutputFormat::Csv,
            &RunOverrides::default(),
        )
        .unwrap();
        assert_eq!(a.outputs, b.outputs);
        for file in &a.outputs {
            let bytes_a = fs::read(a.out_dir.join(file)).unwrap();
            let bytes_b = fs::read(b.out_dir.join(file)).unwrap();
            assert_eq!(bytes_a, bytes_b, "{file} differs between reruns");
        }
    }

    #[test]
    fn json_format_switches_series_files() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = inverse_scenario(vec![Analysis::Speed]);
        let report = run(
            &scenario,
            dir.path(),
            OutputFormat::Json,
            &RunOverrides::default(),
        )
        .unwrap();
        assert!(report.outputs.contains(&"speed_0.json".to_string()));
    }
}
