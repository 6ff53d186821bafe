//! Body representations: complete Reinhardt sets in ℂⁿ and unconditional
//! convex bodies in ℝⁿ, plus random constructor families for sweeps.
//!
//! Both families serialize to a descriptor string (`kind:key=value,…`,
//! factors joined by `*`), which is what the CLI accepts and what reports
//! record.

pub(crate) mod descriptor;
pub mod families;
mod reinhardt;
mod unconditional;

pub use reinhardt::{ClosureViolation, CustomShadow, DownwardClosureReport, ReinhardtBody, ReinhardtShape};
pub use unconditional::{CustomMember, UnconditionalBody, UnconditionalShape, UnconditionalityReport};

pub(crate) use reinhardt::radial_moment;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measures::MeasureKind;

/// A body of either family.
#[derive(Debug, Clone)]
pub enum Body {
    Reinhardt(ReinhardtBody),
    Unconditional(UnconditionalBody),
}

impl Body {
    /// Parses a descriptor in the family implied by the measure.
    pub fn parse(input: &str, measure: MeasureKind) -> Result<Self> {
        match measure {
            MeasureKind::ComplexGaussian { n } => {
                let body = ReinhardtBody::parse(input)?;
                check_matches(body.dim(), n)?;
                Ok(Body::Reinhardt(body))
            }
            MeasureKind::Exponential { n } => {
                let body = UnconditionalBody::parse(input)?;
                check_matches(body.dim(), n)?;
                Ok(Body::Unconditional(body))
            }
            other => Err(Error::param(
                "measure",
                format!("bodies live in ℂⁿ or ℝⁿ, not under {other}"),
            )),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::Reinhardt(b) => b.dim(),
            Body::Unconditional(b) => b.dim(),
        }
    }

    /// The measure this body is evaluated against.
    pub fn natural_measure(&self) -> MeasureKind {
        match self {
            Body::Reinhardt(b) => MeasureKind::ComplexGaussian { n: b.dim() },
            Body::Unconditional(b) => MeasureKind::Exponential { n: b.dim() },
        }
    }

    pub fn dilate(&self, t: f64) -> Result<Self> {
        Ok(match self {
            Body::Reinhardt(b) => Body::Reinhardt(b.dilate(t)?),
            Body::Unconditional(b) => Body::Unconditional(b.dilate(t)?),
        })
    }

    pub fn product(left: &Body, right: &Body) -> Result<Self> {
        match (left, right) {
            (Body::Reinhardt(a), Body::Reinhardt(b)) => {
                Ok(Body::Reinhardt(ReinhardtBody::product(vec![a.clone(), b.clone()])?))
            }
            (Body::Unconditional(a), Body::Unconditional(b)) => Ok(Body::Unconditional(
                UnconditionalBody::product(vec![a.clone(), b.clone()])?,
            )),
            _ => Err(Error::FamilyMismatch(format!(
                "cannot multiply {left} with {right}: one is a Reinhardt set in ℂⁿ, the other a body in ℝⁿ"
            ))),
        }
    }

    /// Membership of a sample point of the natural measure (2n reals in
    /// ℂⁿ, n reals in ℝⁿ).
    pub fn contains(&self, point: &[f64]) -> Result<bool> {
        match self {
            Body::Reinhardt(b) => b.contains(point),
            Body::Unconditional(b) => b.contains(point),
        }
    }

    pub fn exact_measure_and_moment(&self) -> Option<(f64, f64)> {
        match self {
            Body::Reinhardt(b) => b.exact_measure_and_moment(),
            Body::Unconditional(b) => b.exact_measure_and_moment(),
        }
    }

    pub fn is_validated(&self) -> bool {
        match self {
            Body::Reinhardt(b) => b.is_validated(),
            Body::Unconditional(b) => b.is_validated(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Body::Reinhardt(b) => b.kind(),
            Body::Unconditional(b) => b.kind(),
        }
    }

    /// The body with its class hypothesis sampled (downward closure in the
    /// moduli, or unconditionality and convexity). Constructor-built bodies
    /// pass through unchanged.
    pub fn validated(&self, samples: usize, seed: u64) -> Result<Self> {
        Ok(match self {
            Body::Reinhardt(b) => Body::Reinhardt(b.clone().validate(samples, seed)?),
            Body::Unconditional(b) => Body::Unconditional(b.clone().validate(samples, seed)?),
        })
    }
}

fn check_matches(body_dim: usize, measure_dim: usize) -> Result<()> {
    if body_dim == measure_dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: measure_dim,
            actual: body_dim,
        })
    }
}

impl From<ReinhardtBody> for Body {
    fn from(b: ReinhardtBody) -> Self {
        Body::Reinhardt(b)
    }
}

impl From<UnconditionalBody> for Body {
    fn from(b: UnconditionalBody) -> Self {
        Body::Unconditional(b)
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::Reinhardt(b) => b.fmt(f),
            Body::Unconditional(b) => b.fmt(f),
        }
    }
}

impl Serialize for Body {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
