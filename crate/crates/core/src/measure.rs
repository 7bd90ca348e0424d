//! Positive finite measures on the real line: point masses plus weighted
//! absolutely-continuous families (Cauchy, Gaussian, uniform).
//!
//! Integration against the absolutely-continuous parts substitutes
//! `s = location + scale * tan(theta)` so that infinite supports become the
//! finite interval `(-pi/2, pi/2)`; the integrand kernels arising downstream
//! decay like `1/s` or slower, so plain truncation would be unreliable.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadTol};

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
const SQRT_TWO_PI: f64 = 2.506628274631000502415765284811;

/// A point mass `weight * delta_{location}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Absolutely-continuous density families, each normalized to unit mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AcFamily {
    /// `scale / (pi ((s - center)^2 + scale^2))`; second moment infinite.
    Cauchy { center: f64, scale: f64 },
    /// `exp(-(s - mean)^2 / (2 sigma^2)) / (sigma sqrt(2 pi))`; all moments finite.
    Gaussian { mean: f64, sigma: f64 },
    /// `1/(b - a)` on `[a, b]`; all moments finite.
    Uniform { a: f64, b: f64 },
}

impl AcFamily {
    pub fn second_moment_finite(&self) -> bool {
        !matches!(self, AcFamily::Cauchy { .. })
    }

    /// First moment of the unit-mass density. For Cauchy this is the
    /// symmetric principal value about the center.
    fn first_moment(&self) -> f64 {
        match *self {
            AcFamily::Cauchy { center, .. } => center,
            AcFamily::Gaussian { mean, .. } => mean,
            AcFamily::Uniform { a, b } => 0.5 * (a + b),
        }
    }

    fn second_moment(&self) -> Option<f64> {
        match *self {
            AcFamily::Cauchy { .. } => None,
            AcFamily::Gaussian { mean, sigma } => Some(mean * mean + sigma * sigma),
            AcFamily::Uniform { a, b } => Some((a * a + a * b + b * b) / 3.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            AcFamily::Cauchy { center, scale } => center.is_finite() && scale > 0.0,
            AcFamily::Gaussian { mean, sigma } => mean.is_finite() && sigma > 0.0,
            AcFamily::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMeasure(format!(
                "bad family parameters {self:?}"
            )))
        }
    }

    /// Integrate `f` against the unit-mass density by adaptive quadrature.
    fn integrate<F: Fn(f64) -> Complex64>(&self, f: &F, tol: &QuadTol) -> quad::QuadOutcome {
        match *self {
            AcFamily::Cauchy { center, scale } => {
                // s = center + scale tan(theta) turns the density into dtheta/pi.
                quad::integrate(
                    |theta| f(center + scale * theta.tan()) / std::f64::consts::PI,
                    -HALF_PI,
                    HALF_PI,
                    tol,
                )
            }
            AcFamily::Gaussian { mean, sigma } => quad::integrate(
                |theta| {
                    let u = theta.tan();
                    let jac = (-0.5 * u * u).exp() * (1.0 + u * u) / SQRT_TWO_PI;
                    if jac == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        f(mean + sigma * u) * jac
                    }
                },
                -HALF_PI,
                HALF_PI,
                tol,
            ),
            AcFamily::Uniform { a, b } => {
                let inv = 1.0 / (b - a);
                quad::integrate(|s| f(s) * inv, a, b, tol)
            }
        }
    }
}

/// One weighted absolutely-continuous component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcPart {
    pub family: AcFamily,
    pub weight: f64,
}

/// Value of a moment integral, which may be infinite (Cauchy tails).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Moment::Finite(_))
    }
}

/// A positive finite measure: atoms plus absolutely-continuous parts.
/// The empty (null) measure is representable and reported by `is_null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct Measure {
    atoms: Vec<Atom>,
    ac_parts: Vec<AcPart>,
}

impl Measure {
    pub fn new(atoms: Vec<Atom>, ac_parts: Vec<AcPart>) -> Result<Self> {
        for atom in &atoms {
            if !(atom.weight > 0.0) || !atom.location.is_finite() || !atom.weight.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {} with weight {}: weights must be strictly positive and finite",
                    atom.location, atom.weight
                )));
            }
        }
        for part in &ac_parts {
            part.family.validate()?;
            if !(part.weight > 0.0) || !part.weight.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "family weight {} must be strictly positive and finite",
                    part.weight
                )));
            }
        }
        Ok(Self { atoms, ac_parts })
    }

    /// The null measure.
    pub fn null() -> Self {
        Self {
            atoms: Vec::new(),
            ac_parts: Vec::new(),
        }
    }

    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            atoms
                .iter()
                .map(|&(location, weight)| Atom { location, weight })
                .collect(),
            Vec::new(),
        )
    }

    pub fn single_atom(location: f64, weight: f64) -> Result<Self> {
        Self::from_atoms(&[(location, weight)])
    }

    pub fn from_family(family: AcFamily, weight: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![AcPart { family, weight }])
    }

    pub fn is_null(&self) -> bool {
        self.atoms.is_empty() && self.ac_parts.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn ac_parts(&self) -> &[AcPart] {
        &self.ac_parts
    }

    /// Total mass of the measure.
    pub fn mass(&self) -> f64 {
        let atom_mass: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let ac_mass: f64 = self.ac_parts.iter().map(|p| p.weight).sum();
        atom_mass + ac_mass
    }

    /// `int s^k dmu` for `k` in {1, 2}, computed from closed forms per family.
    ///
    /// The first moment of a Cauchy part is the symmetric principal value
    /// about its center; the second moment of any Cauchy part is infinite.
    pub fn moment(&self, k: u32) -> Result<Moment> {
        match k {
            1 => {
                let atoms: f64 = self.atoms.iter().map(|a| a.weight * a.location).sum();
                let ac: f64 = self
                    .ac_parts
                    .iter()
                    .map(|p| p.weight * p.family.first_moment())
                    .sum();
                Ok(Moment::Finite(atoms + ac))
            }
            2 => {
                let mut total: f64 = self
                    .atoms
                    .iter()
                    .map(|a| a.weight * a.location * a.location)
                    .sum();
                for part in &self.ac_parts {
                    match part.family.second_moment() {
                        Some(m2) => total += part.weight * m2,
                        None => return Ok(Moment::Infinite),
                    }
                }
                Ok(Moment::Finite(total))
            }
            other => Err(Error::InvalidMomentOrder(other)),
        }
    }

    pub fn second_moment_finite(&self) -> bool {
        self.ac_parts
            .iter()
            .all(|p| p.family.second_moment_finite())
    }

    /// `int (1 + s^2) dmu`, the quantity entering the extremal rate constant.
    pub fn one_plus_s_squared(&self) -> Moment {
        match self.moment(2).expect("k = 2 is valid") {
            Moment::Finite(m2) => Moment::Finite(self.mass() + m2),
            Moment::Infinite => Moment::Infinite,
        }
    }

    /// Integrate a complex-valued function against the measure.
    ///
    /// The atom part is a finite sum; each absolutely-continuous part is
    /// integrated adaptively. Non-convergence of the quadrature is reported
    /// together with the partial value and error estimate.
    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F, tol: &QuadTol) -> Result<Complex64> {
        let mut value: Complex64 = self.atoms.iter().map(|a| f(a.location) * a.weight).sum();
        let mut error = 0.0;
        let mut converged = true;
        for part in &self.ac_parts {
            let out = part.family.integrate(&f, tol);
            value += out.value * part.weight;
            error += out.error * part.weight;
            converged &= out.converged;
        }
        if converged {
            Ok(value)
        } else {
            Err(Error::QuadratureDidNotConverge {
                partial: value,
                error,
            })
        }
    }
}

// Scenario JSON shape: {"atoms":[[s,w],...],"ac":[{"family":"cauchy","params":[c,g],"weight":w},...]}

#[derive(Serialize, Deserialize)]
struct AcRepr {
    family: String,
    params: [f64; 2],
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    #[serde(default)]
    atoms: Vec<(f64, f64)>,
    #[serde(default)]
    ac: Vec<AcRepr>,
}

impl TryFrom<MeasureRepr> for Measure {
    type Error = Error;

    fn try_from(repr: MeasureRepr) -> Result<Self> {
        let atoms = repr
            .atoms
            .into_iter()
            .map(|(location, weight)| Atom { location, weight })
            .collect();
        let ac_parts = repr
            .ac
            .into_iter()
            .map(|r| {
                let family = match r.family.as_str() {
                    "cauchy" => AcFamily::Cauchy {
                        center: r.params[0],
                        scale: r.params[1],
                    },
                    "gaussian" => AcFamily::Gaussian {
                        mean: r.params[0],
                        sigma: r.params[1],
                    },
                    "uniform" => AcFamily::Uniform {
                        a: r.params[0],
                        b: r.params[1],
                    },
                    other => {
                        return Err(Error::InvalidMeasure(format!(
                            "unknown family {other:?}, expected cauchy, gaussian or uniform"
                        )))
                    }
                };
                Ok(AcPart {
                    family,
                    weight: r.weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Measure::new(atoms, ac_parts)
    }
}

impl From<Measure> for MeasureRepr {
    fn from(mu: Measure) -> Self {
        MeasureRepr {
            atoms: mu.atoms.iter().map(|a| (a.location, a.weight)).collect(),
            ac: mu
                .ac_parts
                .iter()
                .map(|p| {
                    let (family, params) = match p.family {
                        AcFamily::Cauchy { center, scale } => ("cauchy", [center, scale]),
                        AcFamily::Gaussian { mean, sigma } => ("gaussian", [mean, sigma]),
                        AcFamily::Uniform { a, b } => ("uniform", [a, b]),
                    };
                    AcRepr {
                        family: family.to_string(),
                        params,
                        weight: p.weight,
                    }
                })
                .collect(),
        }
    }
}
