//! Unconditional convex bodies in ℝⁿ.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::descriptor::{fmt_list, fmt_num, parse_atom, split_product, Atom};
use crate::error::{Error, Result};
use crate::measures::{check_dim, interval_first_moment};
use crate::rng::SampleStream;
use crate::special::regularized_gamma_p;

type MemberFn = dyn Fn(&[f64]) -> bool + Send + Sync;

#[derive(Clone)]
pub struct CustomMember {
    name: String,
    n: usize,
    scale: f64,
    member: Arc<MemberFn>,
}

impl fmt::Debug for CustomMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMember")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("scale", &self.scale)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum UnconditionalShape {
    /// `{|x₁| ≤ p}`.
    Strip { half_width: f64, n: usize },
    /// `[-a, a]ⁿ`.
    Cube { half_width: f64, n: usize },
    /// `Π [-a_k, a_k]`; an intersection of coordinate strips. Infinite
    /// half-widths leave a coordinate free.
    Box { half_widths: Vec<f64> },
    /// `{Σ w_k |x_k|^p ≤ scale^p}` with `p ≥ 1`.
    WeightedLp { p: f64, weights: Vec<f64>, scale: f64 },
    /// `{Σ |x_k| ≤ a}`.
    CrossPolytope { radius: f64, n: usize },
    Full { n: usize },
    Empty { n: usize },
    Product(Vec<UnconditionalBody>),
    Custom(CustomMember),
}

/// An unconditional convex body.
#[derive(Debug, Clone)]
pub struct UnconditionalBody {
    shape: UnconditionalShape,
    validated: bool,
}

fn check_half_width(name: &'static str, a: f64) -> Result<()> {
    if a >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{a} must be non-negative")))
    }
}

impl UnconditionalBody {
    fn built(shape: UnconditionalShape) -> Self {
        UnconditionalBody { shape, validated: true }
    }

    pub fn strip(half_width: f64, n: usize) -> Result<Self> {
        check_half_width("p", half_width)?;
        check_dim(n)?;
        Ok(Self::built(UnconditionalShape::Strip { half_width, n }))
    }

    pub fn cube(half_width: f64, n: usize) -> Result<Self> {
        check_half_width("a", half_width)?;
        check_dim(n)?;
        Ok(Self::built(UnconditionalShape::Cube { half_width, n }))
    }

    pub fn boxed(half_widths: Vec<f64>) -> Result<Self> {
        if half_widths.is_empty() {
            return Err(Error::param("a", "at least one half-width is required"));
        }
        for &a in &half_widths {
            check_half_width("a", a)?;
        }
        Ok(Self::built(UnconditionalShape::Box { half_widths }))
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>, scale: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::param(
                "p",
                format!("exponent {p} must be finite and at least 1 for a convex body"),
            ));
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
        Ok(Self::built(UnconditionalShape::WeightedLp { p, weights, scale }))
    }

    pub fn cross_polytope(radius: f64, n: usize) -> Result<Self> {
        check_half_width("a", radius)?;
        check_dim(n)?;
        Ok(Self::built(UnconditionalShape::CrossPolytope { radius, n }))
    }

    pub fn full(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::built(UnconditionalShape::Full { n }))
    }

    pub fn empty(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::built(UnconditionalShape::Empty { n }))
    }

    /// Arbitrary membership predicate. Admitted unvalidated.
    pub fn custom<F>(name: impl Into<String>, n: usize, member: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        check_dim(n)?;
        Ok(UnconditionalBody {
            shape: UnconditionalShape::Custom(CustomMember {
                name: name.into(),
                n,
                scale: 1.0,
                member: Arc::new(member),
            }),
            validated: false,
        })
    }

    /// Cartesian product, simplified to a box (or strip, cube, full space)
    /// when every factor is an axis-parallel box.
    pub fn product(parts: Vec<UnconditionalBody>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::param("parts", "product of zero bodies"));
        }
        let validated = parts.iter().all(|p| p.validated);
        let mut flat = Vec::new();
        for part in parts {
            match part.shape {
                UnconditionalShape::Product(inner) => flat.extend(inner),
                _ => flat.push(part),
            }
        }
        if flat.len() == 1 {
            return Ok(flat.pop().expect("one part"));
        }
        let widths: Option<Vec<f64>> = flat.iter().try_fold(Vec::new(), |mut acc, part| {
            acc.extend(part.box_half_widths()?);
            Some(acc)
        });
        if let Some(widths) = widths {
            return Ok(Self::from_half_widths(widths));
        }
        Ok(UnconditionalBody {
            shape: UnconditionalShape::Product(flat),
            validated,
        })
    }

    fn from_half_widths(widths: Vec<f64>) -> Self {
        let n = widths.len();
        if widths.iter().all(|a| a.is_infinite()) {
            Self::built(UnconditionalShape::Full { n })
        } else if n > 1 && widths[1..].iter().all(|a| a.is_infinite()) {
            Self::built(UnconditionalShape::Strip {
                half_width: widths[0],
                n,
            })
        } else {
            Self::built(UnconditionalShape::Box { half_widths: widths })
        }
    }

    fn box_half_widths(&self) -> Option<Vec<f64>> {
        match &self.shape {
            UnconditionalShape::Strip { half_width, n } => {
                let mut w = vec![f64::INFINITY; *n];
                w[0] = *half_width;
                Some(w)
            }
            UnconditionalShape::Cube { half_width, n } => Some(vec![*half_width; *n]),
            UnconditionalShape::Box { half_widths } => Some(half_widths.clone()),
            UnconditionalShape::Full { n } => Some(vec![f64::INFINITY; *n]),
            _ => None,
        }
    }

    pub fn shape(&self) -> &UnconditionalShape {
        &self.shape
    }

    pub fn kind(&self) -> &'static str {
        match self.shape {
            UnconditionalShape::Strip { .. } => "strip",
            UnconditionalShape::Cube { .. } => "cube",
            UnconditionalShape::Box { .. } => "box",
            UnconditionalShape::WeightedLp { .. } => "weighted-lp-ball",
            UnconditionalShape::CrossPolytope { .. } => "cross-polytope",
            UnconditionalShape::Full { .. } => "full",
            UnconditionalShape::Empty { .. } => "empty",
            UnconditionalShape::Product(_) => "product",
            UnconditionalShape::Custom(_) => "custom",
        }
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            UnconditionalShape::Strip { n, .. }
            | UnconditionalShape::Cube { n, .. }
            | UnconditionalShape::CrossPolytope { n, .. }
            | UnconditionalShape::Full { n }
            | UnconditionalShape::Empty { n } => *n,
            UnconditionalShape::Box { half_widths } => half_widths.len(),
            UnconditionalShape::WeightedLp { weights, .. } => weights.len(),
            UnconditionalShape::Product(parts) => parts.iter().map(UnconditionalBody::dim).sum(),
            UnconditionalShape::Custom(c) => c.n,
        }
    }

    /// Membership without a dimension check.
    pub fn member(&self, x: &[f64]) -> bool {
        match &self.shape {
            UnconditionalShape::Strip { half_width, .. } => x[0].abs() <= *half_width,
            UnconditionalShape::Cube { half_width, .. } => x.iter().all(|v| v.abs() <= *half_width),
            UnconditionalShape::Box { half_widths } => {
                x.iter().zip(half_widths).all(|(v, a)| v.abs() <= *a)
            }
            UnconditionalShape::WeightedLp { p, weights, scale } => {
                let sum: f64 = if *p == 1.0 {
                    x.iter().zip(weights).map(|(v, w)| w * v.abs()).sum()
                } else if *p == 2.0 {
                    x.iter().zip(weights).map(|(v, w)| w * v * v).sum()
                } else {
                    x.iter().zip(weights).map(|(v, w)| w * v.abs().powf(*p)).sum()
                };
                sum <= scale.powf(*p)
            }
            UnconditionalShape::CrossPolytope { radius, .. } => {
                x.iter().map(|v| v.abs()).sum::<f64>() <= *radius
            }
            UnconditionalShape::Full { .. } => true,
            UnconditionalShape::Empty { .. } => false,
            UnconditionalShape::Product(parts) => {
                let mut offset = 0;
                parts.iter().all(|part| {
                    let d = part.dim();
                    let inside = part.member(&x[offset..offset + d]);
                    offset += d;
                    inside
                })
            }
            UnconditionalShape::Custom(c) => {
                if c.scale == 1.0 {
                    (c.member)(x)
                } else {
                    let scaled: Vec<f64> = x.iter().map(|v| v / c.scale).collect();
                    (c.member)(&scaled)
                }
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        Ok(self.member(x))
    }

    pub fn dilate(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::param("t", format!("dilation factor {t} must be positive and finite")));
        }
        let shape = match &self.shape {
            UnconditionalShape::Strip { half_width, n } => UnconditionalShape::Strip {
                half_width: half_width * t,
                n: *n,
            },
            UnconditionalShape::Cube { half_width, n } => UnconditionalShape::Cube {
                half_width: half_width * t,
                n: *n,
            },
            UnconditionalShape::Box { half_widths } => UnconditionalShape::Box {
                half_widths: half_widths.iter().map(|a| a * t).collect(),
            },
            UnconditionalShape::WeightedLp { p, weights, scale } => UnconditionalShape::WeightedLp {
                p: *p,
                weights: weights.clone(),
                scale: scale * t,
            },
            UnconditionalShape::CrossPolytope { radius, n } => UnconditionalShape::CrossPolytope {
                radius: radius * t,
                n: *n,
            },
            UnconditionalShape::Full { n } => UnconditionalShape::Full { n: *n },
            UnconditionalShape::Empty { n } => UnconditionalShape::Empty { n: *n },
            UnconditionalShape::Product(parts) => UnconditionalShape::Product(
                parts.iter().map(|p| p.dilate(t)).collect::<Result<_>>()?,
            ),
            UnconditionalShape::Custom(c) => UnconditionalShape::Custom(CustomMember {
                scale: c.scale * t,
                ..c.clone()
            }),
        };
        Ok(UnconditionalBody {
            shape,
            validated: self.validated,
        })
    }

    /// Per-coordinate bound on `|x_k|` over the body (may be ∞).
    pub fn bounding_half_widths(&self) -> Vec<f64> {
        match &self.shape {
            UnconditionalShape::WeightedLp { p, weights, scale } => {
                weights.iter().map(|w| scale / w.powf(1.0 / p)).collect()
            }
            UnconditionalShape::CrossPolytope { radius, n } => vec![*radius; *n],
            UnconditionalShape::Empty { n } => vec![0.0; *n],
            UnconditionalShape::Product(parts) => {
                parts.iter().flat_map(|p| p.bounding_half_widths()).collect()
            }
            UnconditionalShape::Custom(c) => vec![f64::INFINITY; c.n],
            _ => self.box_half_widths().expect("box-like shape"),
        }
    }

    /// Minkowski functional `inf{t > 0 : x ∈ tK}`; a (semi)norm whose unit
    /// ball is the body.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let ratio = |v: f64, a: f64| {
            if v == 0.0 {
                0.0
            } else {
                v.abs() / a
            }
        };
        match &self.shape {
            UnconditionalShape::Strip { half_width, .. } => ratio(x[0], *half_width),
            UnconditionalShape::Cube { half_width, .. } => {
                x.iter().map(|v| ratio(*v, *half_width)).fold(0.0, f64::max)
            }
            UnconditionalShape::Box { half_widths } => x
                .iter()
                .zip(half_widths)
                .map(|(v, a)| ratio(*v, *a))
                .fold(0.0, f64::max),
            UnconditionalShape::WeightedLp { p, weights, scale } => {
                let sum: f64 = x.iter().zip(weights).map(|(v, w)| w * v.abs().powf(*p)).sum();
                ratio(sum.powf(1.0 / p), *scale)
            }
            UnconditionalShape::CrossPolytope { radius, .. } => {
                ratio(x.iter().map(|v| v.abs()).sum(), *radius)
            }
            UnconditionalShape::Full { .. } => 0.0,
            UnconditionalShape::Empty { .. } => f64::INFINITY,
            UnconditionalShape::Product(parts) => {
                let mut offset = 0;
                parts
                    .iter()
                    .map(|part| {
                        let d = part.dim();
                        let g = part.gauge(&x[offset..offset + d]);
                        offset += d;
                        g
                    })
                    .fold(0.0, f64::max)
            }
            UnconditionalShape::Custom(_) => self.gauge_by_bisection(x),
        }
    }

    fn gauge_by_bisection(&self, x: &[f64]) -> f64 {
        if x.iter().all(|v| *v == 0.0) {
            return 0.0;
        }
        let inside = |t: f64| {
            let y: Vec<f64> = x.iter().map(|v| v / t).collect();
            self.member(&y)
        };
        let mut hi = 1.0;
        while !inside(hi) {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        let mut lo = hi / 2.0;
        while inside(lo) {
            lo /= 2.0;
            if lo < 1e-300 {
                return 0.0;
            }
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Closed-form `(λ_n(K), ∫_K |x|₁ dλ_n)` where one is known.
    pub fn exact_measure_and_moment(&self) -> Option<(f64, f64)> {
        let interval = |a: f64| (-(-a).exp_m1(), interval_first_moment(a));
        match &self.shape {
            UnconditionalShape::Strip { .. }
            | UnconditionalShape::Cube { .. }
            | UnconditionalShape::Box { .. }
            | UnconditionalShape::Full { .. } => {
                let factors: Vec<(f64, f64)> =
                    self.box_half_widths()?.into_iter().map(interval).collect();
                Some(combine_product(&factors))
            }
            UnconditionalShape::CrossPolytope { radius, n } => Some(cross_polytope_exact(*radius, *n)),
            UnconditionalShape::WeightedLp { p, weights, scale } => {
                if weights.len() == 1 {
                    Some(interval(scale / weights[0].powf(1.0 / p)))
                } else if *p == 1.0 && weights.iter().all(|&w| w == weights[0]) {
                    Some(cross_polytope_exact(scale / weights[0], weights.len()))
                } else {
                    None
                }
            }
            UnconditionalShape::Empty { .. } => Some((0.0, 0.0)),
            UnconditionalShape::Product(parts) => {
                let factors: Option<Vec<(f64, f64)>> =
                    parts.iter().map(UnconditionalBody::exact_measure_and_moment).collect();
                Some(combine_product(&factors?))
            }
            UnconditionalShape::Custom(_) => None,
        }
    }

    /// Sampled check of sign-flip invariance and midpoint convexity.
    pub fn check_unconditional_convex(&self, pairs: usize, seed: u64) -> Result<UnconditionalityReport> {
        if pairs == 0 {
            return Err(Error::param("pairs", "at least one pair is required"));
        }
        let n = self.dim();
        let extent: Vec<f64> = self
            .bounding_half_widths()
            .into_iter()
            .map(|b| if b.is_finite() && b > 0.0 { 1.25 * b } else { 6.0 })
            .collect();
        let mut report = UnconditionalityReport {
            pairs_requested: pairs,
            sign_flips_tested: 0,
            midpoints_tested: 0,
            sign_flip_violation: None,
            midpoint_violation: None,
        };
        let mut pending: Option<Vec<f64>> = None;
        // Rejection sampling; the attempt budget bounds the work for thin bodies.
        let attempts = (pairs as u64).saturating_mul(50);
        for i in 0..attempts {
            let mut reader = SampleStream::new(seed, 1).at(i).reader(n as u64 + 1);
            let x: Vec<f64> = extent.iter().map(|e| (2.0 * reader.next_open01() - 1.0) * e).collect();
            let signs = reader.next_u64();
            let flipped: Vec<f64> = x
                .iter()
                .enumerate()
                .map(|(k, v)| if (signs >> (k % 64)) & 1 == 1 { -v } else { *v })
                .collect();
            report.sign_flips_tested += 1;
            if self.member(&x) != self.member(&flipped) {
                report.sign_flip_violation = Some(vec![x, flipped]);
                return Ok(report);
            }
            if !self.member(&x) {
                continue;
            }
            match pending.take() {
                None => pending = Some(x),
                Some(y) => {
                    let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
                    report.midpoints_tested += 1;
                    if !self.member(&mid) {
                        report.midpoint_violation = Some(vec![x, y, mid]);
                        return Ok(report);
                    }
                    if report.midpoints_tested >= pairs {
                        break;
                    }
                }
            }
        }
        Ok(report)
    }

    pub fn validate(mut self, pairs: usize, seed: u64) -> Result<Self> {
        if self.validated {
            return Ok(self);
        }
        let report = self.check_unconditional_convex(pairs, seed)?;
        if !report.passed() {
            return Err(Error::HypothesisViolated(format!(
                "{self} failed the unconditional convexity check"
            )));
        }
        self.validated = true;
        Ok(self)
    }

    /// Parses a descriptor such as `cube:a=1,n=2` or `strip:p=1 * strip:p=2`.
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
        build_from_atom(&atom).map_err(|e| match e {
            Error::Descriptor { .. } => e,
            other => Error::descriptor(input, other.to_string()),
        })
    }
}

fn build_from_atom(atom: &Atom) -> Result<UnconditionalBody> {
    let n_or_one = |atom: &Atom| atom.opt_dim("n").map(|n| n.unwrap_or(1));
    match atom.kind.as_str() {
        "strip" => {
            atom.only(&["p", "n"])?;
            UnconditionalBody::strip(atom.scalar("p")?, n_or_one(atom)?)
        }
        "cube" => {
            atom.only(&["a", "n"])?;
            UnconditionalBody::cube(atom.scalar("a")?, n_or_one(atom)?)
        }
        "box" => {
            atom.only(&["a"])?;
            UnconditionalBody::boxed(atom.list("a")?.to_vec())
        }
        "cross" | "cross-polytope" => {
            atom.only(&["a", "n"])?;
            UnconditionalBody::cross_polytope(atom.scalar("a")?, n_or_one(atom)?)
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
            UnconditionalBody::weighted_lp(atom.scalar("p")?, weights, scale)
        }
        "full" => {
            atom.only(&["n"])?;
            UnconditionalBody::full(atom.dim("n")?)
        }
        "empty" => {
            atom.only(&["n"])?;
            UnconditionalBody::empty(atom.dim("n")?)
        }
        other => Err(Error::descriptor(
            &atom.source,
            format!("unknown unconditional body kind `{other}`"),
        )),
    }
}

/// `|x|₁` is Gamma(n, 1) under `λ_n`.
fn cross_polytope_exact(radius: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    (
        regularized_gamma_p(nf, radius),
        nf * regularized_gamma_p(nf + 1.0, radius),
    )
}

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

impl fmt::Display for UnconditionalBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            UnconditionalShape::Strip { half_width, n } => write!(f, "strip:p={},n={n}", fmt_num(*half_width)),
            UnconditionalShape::Cube { half_width, n } => write!(f, "cube:a={},n={n}", fmt_num(*half_width)),
            UnconditionalShape::Box { half_widths } => write!(f, "box:a={}", fmt_list(half_widths)),
            UnconditionalShape::WeightedLp { p, weights, scale } => write!(
                f,
                "lp:p={},w={},scale={}",
                fmt_num(*p),
                fmt_list(weights),
                fmt_num(*scale)
            ),
            UnconditionalShape::CrossPolytope { radius, n } => write!(f, "cross:a={},n={n}", fmt_num(*radius)),
            UnconditionalShape::Full { n } => write!(f, "full:n={n}"),
            UnconditionalShape::Empty { n } => write!(f, "empty:n={n}"),
            UnconditionalShape::Product(parts) => {
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    write!(f, "{part}")?;
                }
                Ok(())
            }
            UnconditionalShape::Custom(c) => {
                if c.scale == 1.0 {
                    write!(f, "custom-fn:{}", c.name)
                } else {
                    write!(f, "custom-fn:{}@{}", c.name, fmt_num(c.scale))
                }
            }
        }
    }
}

impl Serialize for UnconditionalBody {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnconditionalityReport {
    pub pairs_requested: usize,
    pub sign_flips_tested: usize,
    pub midpoints_tested: usize,
    pub sign_flip_violation: Option<Vec<Vec<f64>>>,
    pub midpoint_violation: Option<Vec<Vec<f64>>>,
}

impl UnconditionalityReport {
    pub fn passed(&self) -> bool {
        self.sign_flip_violation.is_none() && self.midpoint_violation.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_and_dimension() {
        let cube = UnconditionalBody::cube(1.0, 2).unwrap();
        assert!(cube.contains(&[0.9, -0.9]).unwrap());
        assert!(!cube.contains(&[1.1, 0.0]).unwrap());
        assert!(cube.contains(&[1.0]).is_err());
        let strip = UnconditionalBody::strip(0.5, 3).unwrap();
        assert!(strip.contains(&[0.4, 100.0, -100.0]).unwrap());
    }

    #[test]
    fn strips_multiply_to_rectangles() {
        let p = UnconditionalBody::product(vec![
            UnconditionalBody::strip(1.0, 1).unwrap(),
            UnconditionalBody::strip(2.0, 1).unwrap(),
        ])
        .unwrap();
        assert_eq!(p.to_string(), "box:a=1,2");
        let s = UnconditionalBody::product(vec![
            UnconditionalBody::strip(1.0, 1).unwrap(),
            UnconditionalBody::full(2).unwrap(),
        ])
        .unwrap();
        assert_eq!(s.to_string(), "strip:p=1,n=3");
    }

    #[test]
    fn lp_below_one_is_rejected() {
        assert!(UnconditionalBody::weighted_lp(0.5, vec![1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn gauges_are_homogeneous_norms() {
        let bodies = [
            UnconditionalBody::cube(2.0, 3).unwrap(),
            UnconditionalBody::cross_polytope(1.5, 3).unwrap(),
            UnconditionalBody::weighted_lp(3.0, vec![1.0, 2.0, 0.5], 1.2).unwrap(),
            UnconditionalBody::boxed(vec![1.0, f64::INFINITY, 2.0]).unwrap(),
        ];
        let x = [0.3, -1.2, 0.7];
        for b in &bodies {
            let g = b.gauge(&x);
            assert!((b.gauge(&[0.6, -2.4, 1.4]) - 2.0 * g).abs() < 1e-12);
            assert!(b.member(&x.map(|v| v / (g * 1.000001))));
            assert!(!b.member(&x.map(|v| v / (g * 0.999999))));
        }
    }

    #[test]
    fn bisection_gauge_matches_closed_gauge() {
        let custom = UnconditionalBody::custom("l1", 2, |x| x[0].abs() + x[1].abs() <= 1.0).unwrap();
        let g = custom.gauge(&[0.3, -0.4]);
        assert!((g - 0.7).abs() < 1e-12);
    }

    #[test]
    fn closed_forms() {
        let (m, mom) = UnconditionalBody::strip(1.0, 2).unwrap().exact_measure_and_moment().unwrap();
        assert!((m - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((mom - (2.0 - 3.0 / std::f64::consts::E)).abs() < 1e-14);
        // ℓ1 ball of radius a in one dimension is an interval
        let (m1, mom1) = UnconditionalBody::cross_polytope(0.8, 1).unwrap().exact_measure_and_moment().unwrap();
        assert!((m1 - (1.0 - (-0.8f64).exp())).abs() < 1e-15);
        assert!((mom1 - interval_first_moment(0.8)).abs() < 1e-15);
    }

    #[test]
    fn convexity_checks() {
        for body in [
            UnconditionalBody::cube(1.0, 3).unwrap(),
            UnconditionalBody::cross_polytope(2.0, 2).unwrap(),
            UnconditionalBody::weighted_lp(1.5, vec![1.0, 2.0], 1.0).unwrap(),
        ] {
            let report = body.check_unconditional_convex(10_000, 3).unwrap();
            assert!(report.passed(), "{body}");
            assert_eq!(report.midpoints_tested, 10_000);
        }
        let star = UnconditionalBody::custom("star", 2, |x| x[0].abs().sqrt() + x[1].abs().sqrt() <= 1.0).unwrap();
        assert!(star.check_unconditional_convex(10_000, 3).unwrap().midpoint_violation.is_some());
        let shifted = UnconditionalBody::custom("shifted", 1, |x| (x[0] - 0.5).abs() <= 1.0).unwrap();
        assert!(shifted.check_unconditional_convex(1000, 3).unwrap().sign_flip_violation.is_some());
    }

    #[test]
    fn descriptors() {
        for text in ["strip:p=0.5,n=2", "cube:a=1,n=3", "box:a=1,inf,2", "cross:a=2,n=2", "lp:p=3,w=1,2,scale=1.5"] {
            assert_eq!(UnconditionalBody::parse(text).unwrap().to_string(), text);
        }
        assert_eq!(UnconditionalBody::parse("strip:p=1 * strip:p=2").unwrap().to_string(), "box:a=1,2");
        assert!(UnconditionalBody::parse("polydisc:r=1").is_err());
        assert!(UnconditionalBody::parse("lp:p=0.5,n=2").is_err());
    }
}
