//! Numerical laboratory for one-parameter continuous semigroups of
//! holomorphic self-maps of the upper half-plane.
//!
//! A flow is specified by the Herglotz data `(alpha, beta, mu)` of its
//! infinitesimal generator. The crate integrates orbits, classifies the
//! dynamics (hyperbolic / parabolic, hyperbolic step, shift), and checks
//! the independent characterizations of the extremal escape rate to the
//! attracting boundary point at infinity: the moment test on the data, the
//! angular limit of `z G(z)`, conformality of the square root of the
//! Koenigs chart, the total-speed deviation, and the growth of the induced
//! composition-operator norms after conjugation into the disc.

// Half-plane membership tests are written as `!(z.im > 0.0)` on purpose:
// the negated form also rejects NaN, which `z.im <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flow;
pub mod generator;
pub mod hypgeom;
pub mod koenigs;
pub mod limits;
pub mod measure;
pub mod operators;
pub mod quad;
pub mod rates;
pub mod scenario;

pub use error::{Error, Result};
pub use flow::{integrate_orbit, ClosedFormFamily, FlowConfig, Orbit, Schedule};
pub use generator::{ClassificationReport, CriterionVerdict, HerglotzTriplet, SemigroupKind};
pub use hypgeom::{dist_h, dist_k, total_speed_deviation, SpeedMode};
pub use limits::{GeometricGrid, LimitEstimate, LimitOptions, LimitValue};
pub use measure::{AcFamily, Measure, Moment};
pub use rates::{cross_validate, rate_estimate, RateNormalization, ValidationReport};
pub use scenario::{OutputFormat, RunOverrides, RunReport, Scenario};
