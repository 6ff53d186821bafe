//! Complete Reinhardt sets in ℂⁿ.
//!
//! A complete Reinhardt set `K` is determined by its shadow
//! `{(|z₁|, …, |z_n|) : z ∈ K}`, a downward-closed subset of ℝ₊ⁿ. Every
//! body here stores a shadow predicate; membership of a point of ℂⁿ only
//! looks at the moduli, so phase invariance holds by construction.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::descriptor::{fmt_list, fmt_num, parse_atom, split_product, Atom};
use crate::error::{Error, Result};
use crate::measures::{check_dim, cylinder_measure, cylinder_second_moment, disc_second_moment};
use crate::rng::SampleStream;
use crate::special::{gamma, regularized_gamma_p};

type ShadowFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A user-supplied shadow predicate on radius vectors.
#[derive(Clone)]
pub struct CustomShadow {
    name: String,
    n: usize,
    scale: f64,
    shadow: Arc<ShadowFn>,
}

impl fmt::Debug for CustomShadow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomShadow")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("scale", &self.scale)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum ReinhardtShape {
    /// `{|z₁| ≤ R}` in ℂⁿ.
    Cylinder { radius: f64, n: usize },
    /// `{|z_k| ≤ R_k for all k}`; infinite radii leave a coordinate free.
    Polydisc { radii: Vec<f64> },
    /// `{Σ w_k |z_k|^p ≤ scale^p}`.
    WeightedLp { p: f64, weights: Vec<f64>, scale: f64 },
    Full { n: usize },
    Empty { n: usize },
    /// `{Σ c_k |z_k| ≤ b}`; downward closed only for non-negative `c`.
    LinearShadow { coefficients: Vec<f64>, bound: f64 },
    Product(Vec<ReinhardtBody>),
    Custom(CustomShadow),
}

/// A complete Reinhardt set, or a candidate one awaiting validation.
#[derive(Debug, Clone)]
pub struct ReinhardtBody {
    shape: ReinhardtShape,
    validated: bool,
}

fn check_radius(name: &'static str, r: f64) -> Result<()> {
    if r >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{r} must be non-negative")))
    }
}

fn check_factor(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::param("t", format!("dilation factor {t} must be positive and finite")))
    }
}

impl ReinhardtBody {
    fn built(shape: ReinhardtShape) -> Self {
        ReinhardtBody { shape, validated: true }
    }

    pub fn cylinder(radius: f64, n: usize) -> Result<Self> {
        check_radius("R", radius)?;
        check_dim(n)?;
        Ok(Self::built(ReinhardtShape::Cylinder { radius, n }))
    }

    pub fn polydisc(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::param("r", "at least one radius is required"));
        }
        for &r in &radii {
            check_radius("r", r)?;
        }
        Ok(Self::built(ReinhardtShape::Polydisc { radii }))
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>, scale: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::param("p", format!("exponent {p} must be positive and finite")));
        }
        if weights.is_empty() {
            return Err(Error::param("w", "at least one weight is required"));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::param("w", "weights must be positive and finite"));
        }
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::param("scale", format!("{scale} must be non-negative and finite")));
        }
        Ok(Self::built(ReinhardtShape::WeightedLp { p, weights, scale }))
    }

    pub fn full(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::built(ReinhardtShape::Full { n }))
    }

    pub fn empty(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::built(ReinhardtShape::Empty { n }))
    }

    /// Half-space shadow `Σ c_k r_k ≤ b`. Admitted unvalidated.
    pub fn linear_shadow(coefficients: Vec<f64>, bound: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::param("c", "at least one coefficient is required"));
        }
        if coefficients.iter().chain([&bound]).any(|v| !v.is_finite()) {
            return Err(Error::param("c", "coefficients and bound must be finite"));
        }
        Ok(ReinhardtBody {
            shape: ReinhardtShape::LinearShadow { coefficients, bound },
            validated: false,
        })
    }

    /// Arbitrary shadow predicate on ℝ₊ⁿ. Admitted unvalidated.
    pub fn custom<F>(name: impl Into<String>, n: usize, shadow: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        check_dim(n)?;
        Ok(ReinhardtBody {
            shape: ReinhardtShape::Custom(CustomShadow {
                name: name.into(),
                n,
                scale: 1.0,
                shadow: Arc::new(shadow),
            }),
            validated: false,
        })
    }

    /// Cartesian product `K₁ × … × K_ℓ`, simplified to a polydisc, cylinder
    /// or full space when every factor is one of those.
    pub fn product(parts: Vec<ReinhardtBody>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::param("parts", "product of zero bodies"));
        }
        let validated = parts.iter().all(|p| p.validated);
        let mut flat = Vec::new();
        for part in parts {
            match part.shape {
                ReinhardtShape::Product(inner) => flat.extend(inner),
                _ => flat.push(part),
            }
        }
        if flat.len() == 1 {
            return Ok(flat.pop().expect("one part"));
        }
        let radii: Option<Vec<f64>> = flat.iter().try_fold(Vec::new(), |mut acc, part| {
            acc.extend(part.polydisc_radii()?);
            Some(acc)
        });
        if let Some(radii) = radii {
            return Ok(Self::from_radii(radii));
        }
        Ok(ReinhardtBody {
            shape: ReinhardtShape::Product(flat),
            validated,
        })
    }

    fn from_radii(radii: Vec<f64>) -> Self {
        let n = radii.len();
        if radii.iter().all(|r| r.is_infinite()) {
            Self::built(ReinhardtShape::Full { n })
        } else if n > 1 && radii[1..].iter().all(|r| r.is_infinite()) {
            Self::built(ReinhardtShape::Cylinder { radius: radii[0], n })
        } else {
            Self::built(ReinhardtShape::Polydisc { radii })
        }
    }

    fn polydisc_radii(&self) -> Option<Vec<f64>> {
        match &self.shape {
            ReinhardtShape::Cylinder { radius, n } => {
                let mut r = vec![f64::INFINITY; *n];
                r[0] = *radius;
                Some(r)
            }
            ReinhardtShape::Polydisc { radii } => Some(radii.clone()),
            ReinhardtShape::Full { n } => Some(vec![f64::INFINITY; *n]),
            _ => None,
        }
    }

    pub fn shape(&self) -> &ReinhardtShape {
        &self.shape
    }

    /// Constructor tag.
    pub fn kind(&self) -> &'static str {
        match self.shape {
            ReinhardtShape::Cylinder { .. } => "cylinder",
            ReinhardtShape::Polydisc { .. } => "polydisc",
            ReinhardtShape::WeightedLp { .. } => "weighted-lp-ball",
            ReinhardtShape::Full { .. } => "full",
            ReinhardtShape::Empty { .. } => "empty",
            ReinhardtShape::LinearShadow { .. } | ReinhardtShape::Custom(_) => "custom",
            ReinhardtShape::Product(_) => "product",
        }
    }

    /// Whether the body is known to be downward closed: constructor-built, or
    /// a custom shadow that passed [`ReinhardtBody::validate`].
    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            ReinhardtShape::Cylinder { n, .. }
            | ReinhardtShape::Full { n }
            | ReinhardtShape::Empty { n } => *n,
            ReinhardtShape::Polydisc { radii } => radii.len(),
            ReinhardtShape::WeightedLp { weights, .. } => weights.len(),
            ReinhardtShape::LinearShadow { coefficients, .. } => coefficients.len(),
            ReinhardtShape::Product(parts) => parts.iter().map(ReinhardtBody::dim).sum(),
            ReinhardtShape::Custom(c) => c.n,
        }
    }

    /// Membership of a radius vector in the shadow. No dimension check.
    pub fn shadow_member(&self, r: &[f64]) -> bool {
        match &self.shape {
            ReinhardtShape::Cylinder { radius, .. } => r[0] <= *radius,
            ReinhardtShape::Polydisc { radii } => r.iter().zip(radii).all(|(x, b)| x <= b),
            ReinhardtShape::WeightedLp { p, weights, scale } => {
                let sum: f64 = if *p == 2.0 {
                    r.iter().zip(weights).map(|(x, w)| w * x * x).sum()
                } else {
                    r.iter().zip(weights).map(|(x, w)| w * x.powf(*p)).sum()
                };
                sum <= scale.powf(*p)
            }
            ReinhardtShape::Full { .. } => true,
            ReinhardtShape::Empty { .. } => false,
            ReinhardtShape::LinearShadow { coefficients, bound } => {
                r.iter().zip(coefficients).map(|(x, c)| c * x).sum::<f64>() <= *bound
            }
            ReinhardtShape::Product(parts) => {
                let mut offset = 0;
                parts.iter().all(|part| {
                    let d = part.dim();
                    let inside = part.shadow_member(&r[offset..offset + d]);
                    offset += d;
                    inside
                })
            }
            ReinhardtShape::Custom(c) => {
                if c.scale == 1.0 {
                    (c.shadow)(r)
                } else {
                    let scaled: Vec<f64> = r.iter().map(|x| x / c.scale).collect();
                    (c.shadow)(&scaled)
                }
            }
        }
    }

    /// Membership of a point of ℂⁿ given as `2n` reals in the order
    /// `(Re z₁, Im z₁, …, Re z_n, Im z_n)`.
    pub fn contains(&self, z: &[f64]) -> Result<bool> {
        let n = self.dim();
        if z.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                actual: z.len(),
            });
        }
        let radii: Vec<f64> = z.chunks_exact(2).map(|c| c[0].hypot(c[1])).collect();
        Ok(self.shadow_member(&radii))
    }

    /// `tK = {t z : z ∈ K}`.
    pub fn dilate(&self, t: f64) -> Result<Self> {
        check_factor(t)?;
        let shape = match &self.shape {
            ReinhardtShape::Cylinder { radius, n } => ReinhardtShape::Cylinder {
                radius: radius * t,
                n: *n,
            },
            ReinhardtShape::Polydisc { radii } => ReinhardtShape::Polydisc {
                radii: radii.iter().map(|r| r * t).collect(),
            },
            ReinhardtShape::WeightedLp { p, weights, scale } => ReinhardtShape::WeightedLp {
                p: *p,
                weights: weights.clone(),
                scale: scale * t,
            },
            ReinhardtShape::Full { n } => ReinhardtShape::Full { n: *n },
            ReinhardtShape::Empty { n } => ReinhardtShape::Empty { n: *n },
            ReinhardtShape::LinearShadow { coefficients, bound } => ReinhardtShape::LinearShadow {
                coefficients: coefficients.clone(),
                bound: bound * t,
            },
            ReinhardtShape::Product(parts) => ReinhardtShape::Product(
                parts.iter().map(|p| p.dilate(t)).collect::<Result<_>>()?,
            ),
            ReinhardtShape::Custom(c) => ReinhardtShape::Custom(CustomShadow {
                scale: c.scale * t,
                ..c.clone()
            }),
        };
        Ok(ReinhardtBody {
            shape,
            validated: self.validated,
        })
    }

    /// Per-coordinate bound on the moduli of points in the body (may be ∞).
    pub fn bounding_radii(&self) -> Vec<f64> {
        match &self.shape {
            ReinhardtShape::WeightedLp { p, weights, scale } => {
                weights.iter().map(|w| scale / w.powf(1.0 / p)).collect()
            }
            ReinhardtShape::Empty { n } => vec![0.0; *n],
            ReinhardtShape::LinearShadow { coefficients, bound } => coefficients
                .iter()
                .map(|&c| {
                    if c > 0.0 && coefficients.iter().all(|&d| d >= 0.0) {
                        (bound / c).max(0.0)
                    } else {
                        f64::INFINITY
                    }
                })
                .collect(),
            ReinhardtShape::Product(parts) => parts.iter().flat_map(|p| p.bounding_radii()).collect(),
            ReinhardtShape::Custom(c) => vec![f64::INFINITY; c.n],
            _ => self.polydisc_radii().expect("polydisc-like shape"),
        }
    }

    /// Closed-form `(ν_n(K), ∫_K |z|² dν_n)` where one is known.
    pub fn exact_measure_and_moment(&self) -> Option<(f64, f64)> {
        match &self.shape {
            ReinhardtShape::Cylinder { radius, n } => Some((
                cylinder_measure(*radius, *n).ok()?.value(),
                cylinder_second_moment(*radius, *n).ok()?,
            )),
            ReinhardtShape::Polydisc { radii } => {
                let factors: Vec<(f64, f64)> = radii
                    .iter()
                    .map(|&r| (-(-r * r / 2.0).exp_m1(), disc_second_moment(r)))
                    .collect();
                Some(combine_product(&factors))
            }
            ReinhardtShape::WeightedLp { p, weights, scale } => {
                let n = weights.len();
                if n == 1 {
                    let r = scale / weights[0].powf(1.0 / p);
                    Some((-(-r * r / 2.0).exp_m1(), disc_second_moment(r)))
                } else if *p == 2.0 && weights.iter().all(|&w| w == weights[0]) {
                    // |z|² / 2 ~ Gamma(n, 1)
                    let x = scale * scale / (2.0 * weights[0]);
                    let nf = n as f64;
                    Some((regularized_gamma_p(nf, x), 2.0 * nf * regularized_gamma_p(nf + 1.0, x)))
                } else {
                    None
                }
            }
            ReinhardtShape::Full { n } => Some((1.0, 2.0 * *n as f64)),
            ReinhardtShape::Empty { .. } => Some((0.0, 0.0)),
            ReinhardtShape::LinearShadow { .. } | ReinhardtShape::Custom(_) => None,
            ReinhardtShape::Product(parts) => {
                let factors: Option<Vec<(f64, f64)>> =
                    parts.iter().map(ReinhardtBody::exact_measure_and_moment).collect();
                Some(combine_product(&factors?))
            }
        }
    }

    /// Samples the shadow and checks that coordinatewise-smaller radius
    /// vectors of members are members.
    pub fn check_downward_closed(&self, samples: usize, seed: u64) -> Result<DownwardClosureReport> {
        if samples == 0 {
            return Err(Error::param("samples", "at least one sample is required"));
        }
        let n = self.dim();
        let extent: Vec<f64> = self
            .bounding_radii()
            .into_iter()
            .map(|b| if b.is_finite() && b > 0.0 { 1.25 * b } else { 6.0 })
            .collect();
        // 2n words per sample: n for the point, n for the shrink factors.
        let words = 2 * n as u64;
        let mut members_tested = 0;
        let mut r = vec![0.0; n];
        let mut shrunk = vec![0.0; n];
        for i in 0..samples as u64 {
            let mut reader = SampleStream::new(seed, 0).at(i).reader(words);
            for (x, e) in r.iter_mut().zip(&extent) {
                *x = reader.next_open01() * e;
            }
            let factors: Vec<f64> = (0..n).map(|_| reader.next_open01()).collect();
            if !self.shadow_member(&r) {
                continue;
            }
            members_tested += 1;
            // all coordinates shrunk, then each coordinate alone
            for (s, (x, f)) in shrunk.iter_mut().zip(r.iter().zip(&factors)) {
                *s = x * f;
            }
            let mut candidates = vec![shrunk.clone()];
            for k in 0..n {
                let mut single = r.clone();
                single[k] *= factors[k];
                candidates.push(single);
            }
            for candidate in candidates {
                if !self.shadow_member(&candidate) {
                    return Ok(DownwardClosureReport {
                        samples,
                        members_tested,
                        violation: Some(ClosureViolation {
                            member: r.clone(),
                            smaller: candidate,
                        }),
                    });
                }
            }
        }
        Ok(DownwardClosureReport {
            samples,
            members_tested,
            violation: None,
        })
    }

    /// Runs [`Self::check_downward_closed`] and marks the body validated, or
    /// fails with the counterexample.
    pub fn validate(mut self, samples: usize, seed: u64) -> Result<Self> {
        if self.validated {
            return Ok(self);
        }
        let report = self.check_downward_closed(samples, seed)?;
        if let Some(v) = report.violation {
            return Err(Error::HypothesisViolated(format!(
                "{self} is not a complete Reinhardt set: shadow contains {:?} but not {:?}",
                v.member, v.smaller
            )));
        }
        self.validated = true;
        Ok(self)
    }

    /// Parses a descriptor such as `polydisc:r=1,2` or
    /// `cylinder:R=1,n=1 * lp:p=2,w=1,1,scale=1`.
    pub fn parse(input: &str) -> Result<Self> {
        let parts = split_product(input);
        if parts.len() > 1 {
            let bodies = parts.into_iter().map(Self::parse_atom).collect::<Result<Vec<_>>>()?;
            return Self::product(bodies);
        }
        Self::parse_atom(input)
    }

    fn parse_atom(input: &str) -> Result<Self> {
        let atom = parse_atom(input)?;
        let wrap = |e: Error| match e {
            Error::Descriptor { .. } => e,
            other => Error::descriptor(input, other.to_string()),
        };
        build_from_atom(&atom).map_err(wrap)
    }
}

fn build_from_atom(atom: &Atom) -> Result<ReinhardtBody> {
    match atom.kind.as_str() {
        "cylinder" => {
            atom.only(&["R", "n"])?;
            ReinhardtBody::cylinder(atom.scalar("R")?, atom.opt_dim("n")?.unwrap_or(1))
        }
        "polydisc" => {
            atom.only(&["r"])?;
            ReinhardtBody::polydisc(atom.list("r")?.to_vec())
        }
        "lp" | "weighted-lp-ball" => {
            atom.only(&["p", "w", "n", "scale"])?;
            let weights = match (atom.opt_list("w"), atom.opt_dim("n")?) {
                (Some(w), None) => w.to_vec(),
                (None, Some(n)) => vec![1.0; n],
                (Some(w), Some(n)) if w.len() == n => w.to_vec(),
                _ => return Err(Error::descriptor(&atom.source, "give weights `w` or dimension `n`")),
            };
            let scale = atom.opt_scalar("scale")?.unwrap_or(1.0);
            ReinhardtBody::weighted_lp(atom.scalar("p")?, weights, scale)
        }
        "full" => {
            atom.only(&["n"])?;
            ReinhardtBody::full(atom.dim("n")?)
        }
        "empty" => {
            atom.only(&["n"])?;
            ReinhardtBody::empty(atom.dim("n")?)
        }
        "custom" | "linear" => {
            atom.only(&["c", "b"])?;
            ReinhardtBody::linear_shadow(atom.list("c")?.to_vec(), atom.scalar("b")?)
        }
        other => Err(Error::descriptor(
            &atom.source,
            format!("unknown Reinhardt body kind `{other}`"),
        )),
    }
}

/// Measure and moment of a product from per-factor `(m_i, S_i)`:
/// `m = Π m_i`, `S = Σ_i S_i Π_{j≠i} m_j`.
fn combine_product(factors: &[(f64, f64)]) -> (f64, f64) {
    let measure = factors.iter().map(|f| f.0).product();
    let moment = (0..factors.len())
        .map(|i| {
            factors
                .iter()
                .enumerate()
                .map(|(j, f)| if i == j { f.1 } else { f.0 })
                .product::<f64>()
        })
        .sum();
    (measure, moment)
}

impl fmt::Display for ReinhardtBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            ReinhardtShape::Cylinder { radius, n } => write!(f, "cylinder:R={},n={n}", fmt_num(*radius)),
            ReinhardtShape::Polydisc { radii } => write!(f, "polydisc:r={}", fmt_list(radii)),
            ReinhardtShape::WeightedLp { p, weights, scale } => write!(
                f,
                "lp:p={},w={},scale={}",
                fmt_num(*p),
                fmt_list(weights),
                fmt_num(*scale)
            ),
            ReinhardtShape::Full { n } => write!(f, "full:n={n}"),
            ReinhardtShape::Empty { n } => write!(f, "empty:n={n}"),
            ReinhardtShape::LinearShadow { coefficients, bound } => {
                write!(f, "custom:c={},b={}", fmt_list(coefficients), fmt_num(*bound))
            }
            ReinhardtShape::Product(parts) => {
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    write!(f, "{part}")?;
                }
                Ok(())
            }
            ReinhardtShape::Custom(c) => {
                if c.scale == 1.0 {
                    write!(f, "custom-fn:{}", c.name)
                } else {
                    write!(f, "custom-fn:{}@{}", c.name, fmt_num(c.scale))
                }
            }
        }
    }
}

impl Serialize for ReinhardtBody {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A member of the shadow whose coordinatewise-smaller neighbour is not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureViolation {
    pub member: Vec<f64>,
    pub smaller: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DownwardClosureReport {
    pub samples: usize,
    pub members_tested: usize,
    pub violation: Option<ClosureViolation>,
}

impl DownwardClosureReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// `E r^p` under the radial measure: `2^{p/2} Γ(1 + p/2)`.
pub(crate) fn radial_moment(p: f64) -> f64 {
    2f64.powf(p / 2.0) * gamma(1.0 + p / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(moduli: &[f64], phases: &[f64]) -> Vec<f64> {
        moduli
            .iter()
            .zip(phases)
            .flat_map(|(r, th)| [r * th.cos(), r * th.sin()])
            .collect()
    }

    #[test]
    fn contains_examples() {
        let pd = ReinhardtBody::polydisc(vec![1.0, 2.0]).unwrap();
        assert!(pd.contains(&[0.0; 4]).unwrap());
        assert!(!pd.contains(&point(&[1.5, 0.1], &[0.3, 0.0])).unwrap());
        let ball = ReinhardtBody::weighted_lp(2.0, vec![1.0, 1.0], 1.0).unwrap();
        let r1 = 0.7_f64;
        let r2 = (0.99 - r1 * r1).sqrt();
        assert!(ball.contains(&point(&[r1, r2], &[1.0, 2.0])).unwrap());
        assert!(matches!(
            pd.contains(&[0.0; 3]),
            Err(Error::DimensionMismatch { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn dilation_examples() {
        let pd = ReinhardtBody::polydisc(vec![1.0, 2.0]).unwrap();
        assert_eq!(pd.dilate(2.0).unwrap().to_string(), "polydisc:r=2,4");
        let c = ReinhardtBody::cylinder(1.0, 1).unwrap();
        assert_eq!(c.dilate(3.0).unwrap().to_string(), "cylinder:R=3,n=1");
        assert!(pd.dilate(0.0).is_err());
        assert!(pd.dilate(-1.0).is_err());
    }

    #[test]
    fn product_simplifies_to_polydisc_and_cylinder() {
        let a = ReinhardtBody::cylinder(1.0, 1).unwrap();
        let b = ReinhardtBody::cylinder(2.5, 1).unwrap();
        let p = ReinhardtBody::product(vec![a.clone(), b]).unwrap();
        assert_eq!(p.to_string(), "polydisc:r=1,2.5");
        let q = ReinhardtBody::product(vec![a, ReinhardtBody::full(2).unwrap()]).unwrap();
        assert_eq!(q.to_string(), "cylinder:R=1,n=3");
        let lp = ReinhardtBody::weighted_lp(1.0, vec![1.0, 1.0], 1.0).unwrap();
        let mixed = ReinhardtBody::product(vec![q, lp]).unwrap();
        assert_eq!(mixed.kind(), "product");
        assert_eq!(mixed.dim(), 5);
    }

    #[test]
    fn polydisc_closed_form() {
        let pd = ReinhardtBody::polydisc(vec![1.5, 2.0]).unwrap();
        let (m, _) = pd.exact_measure_and_moment().unwrap();
        let expected = (1.0 - (-1.125f64).exp()) * (1.0 - (-2.0f64).exp());
        assert!((m - expected).abs() < 1e-15);
        assert!((m - 0.583_949_183).abs() < 1e-9);
    }

    #[test]
    fn downward_closure_checks() {
        for body in [
            ReinhardtBody::polydisc(vec![1.0, 2.0, 0.5]).unwrap(),
            ReinhardtBody::weighted_lp(0.7, vec![1.0, 3.0], 2.0).unwrap(),
            ReinhardtBody::cylinder(1.0, 2).unwrap(),
        ] {
            let report = body.check_downward_closed(2000, 1).unwrap();
            assert!(report.passed(), "{body}");
            assert!(report.members_tested > 0);
        }
        let upward = ReinhardtBody::linear_shadow(vec![-1.0, 0.0], -1.0).unwrap();
        assert!(!upward.is_validated());
        let report = upward.check_downward_closed(2000, 1).unwrap();
        let v = report.violation.expect("upward set must fail");
        assert!(v.member[0] >= 1.0 && v.smaller[0] < 1.0);
        assert!(upward.validate(2000, 1).is_err());

        let ok = ReinhardtBody::linear_shadow(vec![1.0, 2.0], 3.0).unwrap();
        assert!(ok.validate(2000, 1).unwrap().is_validated());
    }

    #[test]
    fn custom_shadow_dilation_composes() {
        let body = ReinhardtBody::custom("box", 2, |r| r[0] <= 1.0 && r[1] <= 1.0).unwrap();
        let twice = body.dilate(2.0).unwrap().dilate(1.5).unwrap();
        let once = body.dilate(3.0).unwrap();
        for r in [[2.9, 0.1], [3.1, 0.0], [0.5, 2.99]] {
            assert_eq!(twice.shadow_member(&r), once.shadow_member(&r));
        }
    }

    #[test]
    fn descriptor_round_trip_and_errors() {
        for text in [
            "cylinder:R=1.17741,n=2",
            "polydisc:r=1,2",
            "lp:p=2,w=1,0.5,scale=3",
            "full:n=2",
            "empty:n=1",
            "custom:c=-1,0,b=-1",
        ] {
            let body = ReinhardtBody::parse(text).unwrap();
            assert_eq!(body.to_string(), text);
        }
        let prod = ReinhardtBody::parse("cylinder:R=1 * cylinder:R=2").unwrap();
        assert_eq!(prod.to_string(), "polydisc:r=1,2");
        assert_eq!(ReinhardtBody::parse("lp:p=1,n=2").unwrap().to_string(), "lp:p=1,w=1,1,scale=1");
        for bad in ["cube:a=1", "cylinder:R=-1", "polydisc:r=1,x=2", "lp:p=0,n=2", "lp:p=2"] {
            assert!(matches!(ReinhardtBody::parse(bad), Err(Error::Descriptor { .. })), "{bad}");
        }
    }

    #[test]
    fn radial_moment_values() {
        assert!((radial_moment(2.0) - 2.0).abs() < 1e-14);
        assert!((radial_moment(4.0) - 8.0).abs() < 1e-13);
    }
}
