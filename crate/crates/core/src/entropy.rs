//! The entropy functional `Ent_μ f = ∫ f ln f dμ - (∫ f dμ) ln(∫ f dμ)` and
//! the inequalities built on it: the one-dimensional tail inequality
//!
//! ```text
//! Ent_μ f ≤ -∫ f(x) (1 + ln μ((x, ∞))) dμ(x)     (f ≥ 0 bounded nondecreasing)
//! ```
//!
//! its multidimensional form for phase-invariant coordinatewise monotone `g`,
//!
//! ```text
//! Ent g ≤ ∫ g (Σ u_k - n)      u_k = |z_k|²/2 under ν_n,  u_k = |x_k| under λ_n,
//! ```
//!
//! and the subadditivity step between them.
//!
//! Under `u = r²/2` the radial measure `μ` becomes the unit exponential, so
//! the Gaussian and exponential cases share one engine in `u`-space.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bodies::descriptor::{fmt_list, parse_atom};
use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::integrate::{
    monte_carlo, Engine, Method, SampleView, DETERMINISTIC_TOLERANCE, MAX_QUADRATURE_DIM, SE_MULTIPLIER,
};
use crate::measures::MeasureKind;
use crate::rng::SampleStream;
use crate::serde_ext::extended;
use crate::special::{gauss_laguerre, gauss_legendre, xlogx};

/// Slack tolerance of the exact step-function oracle, relative to `max f`.
pub const EXACT_TOLERANCE: f64 = 1e-12;
/// Documented accuracy of the 1-D quadrature fallback for general `f`.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;
/// Random coordinate-increase pairs used to check monotonicity of `g`.
pub const HYPOTHESIS_SAMPLES: usize = 1000;
/// Probability-space nodes of the inner rule in the Monte Carlo
/// subadditivity check.
pub const SUBADDITIVITY_INNER_NODES: usize = 1024;
/// Gauss-Laguerre order used when the automatic engine picks quadrature.
pub const DEFAULT_QUADRATURE_ORDER: usize = 32;

const PANELS: usize = 4096;
const PANEL_ORDER: usize = 8;

// ---------------------------------------------------------------------------
// Step functions

/// A nonnegative nondecreasing step function on `ℝ₊`: value `v_i` on
/// `[x_i, x_{i+1})` with `x_0 = 0` and `x_{m+1} = ∞`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    jumps: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(jumps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != jumps.len() + 1 {
            return Err(Error::param(
                "values",
                format!("{} jump points need {} values, got {}", jumps.len(), jumps.len() + 1, values.len()),
            ));
        }
        if jumps.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::param("jumps", "jump points must be finite and nonnegative"));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("jumps", "jump points must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::param("values", "values must be finite and nonnegative"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::HypothesisViolated("step function is not nondecreasing".into()));
        }
        Ok(StepFunction { jumps, values })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![c])
    }

    /// The indicator of `[a, ∞)`.
    pub fn tail_indicator(a: f64) -> Result<Self> {
        Self::new(vec![a], vec![0.0, 1.0])
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("at least one value")
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.jumps.partition_point(|&j| j <= x);
        self.values[i]
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param("c", "scale must be positive and finite"));
        }
        Self::new(self.jumps.clone(), self.values.iter().map(|v| c * v).collect())
    }

    /// `step:x=x₁,…,v=v₀,…`; the `x` list may be omitted for constants.
    pub fn parse(input: &str) -> Result<Self> {
        let atom = parse_atom(input)?;
        if atom.kind != "step" {
            return Err(Error::descriptor(input, format!("expected `step`, got `{}`", atom.kind)));
        }
        atom.only(&["x", "v"])?;
        let jumps = atom.opt_list("x").map(<[f64]>::to_vec).unwrap_or_default();
        let values = atom.list("v")?.to_vec();
        Self::new(jumps, values)
    }

    // Interval bounds [b_i, b_{i+1}) paired with their values.
    fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.values.len()).map(move |i| {
            let lo = if i == 0 { 0.0 } else { self.jumps[i - 1] };
            let hi = self.jumps.get(i).copied().unwrap_or(f64::INFINITY);
            (lo, hi, self.values[i])
        })
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.jumps.is_empty() {
            write!(f, "step:v={}", fmt_list(&self.values))
        } else {
            write!(f, "step:x={},v={}", fmt_list(&self.jumps), fmt_list(&self.values))
        }
    }
}

// ---------------------------------------------------------------------------
// One-dimensional measures

/// A probability measure on `ℝ₊` with an accessible tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailMeasure1D {
    /// Density `r e^{-r²/2}`.
    RadialMu,
    /// Density `e^{-x}`.
    Exponential1d,
    Discrete(DiscreteMeasure),
}

/// Finitely many atoms, sorted by location, equal locations merged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    locations: Vec<f64>,
    masses: Vec<f64>,
    // mass strictly above each atom, accumulated from the top
    #[serde(skip)]
    above: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

impl TailMeasure1D {
    pub fn discrete(locations: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if locations.len() != masses.len() || locations.is_empty() {
            return Err(Error::param("atoms", "need equally many locations and masses, at least one"));
        }
        if locations.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::param("atoms", "locations must be finite and nonnegative"));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::param("atoms", "masses must be finite and nonnegative"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param("atoms", format!("masses sum to {total}, not 1")));
        }
        let mut atoms: Vec<(f64, f64)> = locations.into_iter().zip(masses).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut locs: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut mass: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, m) in atoms {
            if locs.last() == Some(&x) {
                *mass.last_mut().unwrap() += m;
            } else {
                locs.push(x);
                mass.push(m);
            }
        }
        let mut above = vec![0.0; mass.len()];
        for j in (0..mass.len().saturating_sub(1)).rev() {
            above[j] = above[j + 1] + mass[j + 1];
        }
        Ok(TailMeasure1D::Discrete(DiscreteMeasure {
            locations: locs,
            masses: mass,
            above,
        }))
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::discrete(vec![x], vec![1.0])
    }

    /// `radial`, `exp`, or `atoms:x=…,w=…`.
    pub fn parse(input: &str) -> Result<Self> {
        match input.trim() {
            "radial" | "radial-mu" | "mu" => Ok(TailMeasure1D::RadialMu),
            "exp" | "exponential" | "exponential-1d" => Ok(TailMeasure1D::Exponential1d),
            other => {
                let atom = parse_atom(other)?;
                if atom.kind != "atoms" {
                    return Err(Error::descriptor(
                        other,
                        "expected `radial`, `exp` or `atoms:x=…,w=…`",
                    ));
                }
                atom.only(&["x", "w"])?;
                Self::discrete(atom.list("x")?.to_vec(), atom.list("w")?.to_vec())
            }
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, TailMeasure1D::Discrete(_))
    }

    /// `μ((t, ∞))`.
    pub fn tail(&self, t: f64) -> f64 {
        match self {
            TailMeasure1D::RadialMu => {
                if t <= 0.0 {
                    1.0
                } else {
                    (-t * t / 2.0).exp()
                }
            }
            TailMeasure1D::Exponential1d => {
                if t <= 0.0 {
                    1.0
                } else {
                    (-t).exp()
                }
            }
            TailMeasure1D::Discrete(d) => {
                // first atom strictly above t
                let j = d.locations.partition_point(|&x| x <= t);
                if j == 0 {
                    d.masses.iter().sum()
                } else {
                    d.above[j - 1]
                }
            }
        }
    }

    /// `μ([a, b))`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        match self {
            TailMeasure1D::Discrete(d) => d
                .locations
                .iter()
                .zip(&d.masses)
                .filter(|(x, _)| **x >= a && **x < b)
                .map(|(_, m)| m)
                .sum(),
            // no atoms, so [a, ∞) and (a, ∞) carry the same mass
            _ => self.tail(a) - self.tail(b),
        }
    }

    /// The point whose upper tail is `s`, for continuous measures.
    fn point_with_tail(&self, s: f64) -> f64 {
        match self {
            TailMeasure1D::RadialMu => (-2.0 * s.ln()).sqrt(),
            TailMeasure1D::Exponential1d => -s.ln(),
            TailMeasure1D::Discrete(_) => unreachable!("continuous measures only"),
        }
    }
}

impl fmt::Display for TailMeasure1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailMeasure1D::RadialMu => f.write_str("radial"),
            TailMeasure1D::Exponential1d => f.write_str("exp"),
            TailMeasure1D::Discrete(d) => write!(f, "atoms:x={},w={}", fmt_list(&d.locations), fmt_list(&d.masses)),
        }
    }
}

/// `H(y) = inf{t ≥ 0 : μ((t, ∞)) ≤ y}`; `+∞` when no finite `t` qualifies.
pub fn inverse_tail(measure: &TailMeasure1D, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::param("y", format!("must lie in [0, 1], got {y}")));
    }
    if measure.tail(0.0) <= y {
        return Ok(0.0);
    }
    Ok(match measure {
        TailMeasure1D::Discrete(d) => {
            // The tail is right-continuous and drops only at atoms, so the
            // infimum is attained at one of them.
            let j = d.above.iter().position(|&t| t <= y).expect("top atom has empty tail");
            d.locations[j]
        }
        continuous => {
            if y == 0.0 {
                f64::INFINITY
            } else {
                continuous.point_with_tail(y)
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Reports

/// Both sides of an entropy inequality and their difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub lhs: f64,
    pub lhs_std_error: f64,
    pub lhs_method: Method,
    #[serde(serialize_with = "extended")]
    pub rhs: f64,
    pub rhs_std_error: f64,
    pub rhs_method: Method,
    /// `rhs - lhs`, `+∞` when the right side is.
    #[serde(serialize_with = "extended")]
    pub slack: f64,
    pub slack_std_error: f64,
    /// The inequality is accepted when `slack ≥ -tolerance`.
    pub tolerance: f64,
    pub holds: bool,
}

impl EntropyReport {
    fn deterministic(lhs: f64, rhs: f64, method: Method, tolerance: f64) -> Self {
        let slack = if rhs == f64::INFINITY { f64::INFINITY } else { rhs - lhs };
        EntropyReport {
            lhs,
            lhs_std_error: 0.0,
            lhs_method: method,
            rhs,
            rhs_std_error: 0.0,
            rhs_method: method,
            slack,
            slack_std_error: 0.0,
            tolerance,
            holds: slack >= -tolerance,
        }
    }
}

// ---------------------------------------------------------------------------
// One-dimensional entropy and the tail inequality

/// `Σ m_i v_i ln(v_i / mean)` from interval masses, which vanishes exactly
/// for constants and equals `-s ln s` exactly for an indicator of mass `s`.
fn entropy_from_pieces(pieces: &[(f64, f64)]) -> f64 {
    let mean: f64 = pieces.iter().map(|(m, v)| m * v).sum();
    if mean <= 0.0 {
        return 0.0;
    }
    pieces
        .iter()
        .filter(|(m, v)| *m > 0.0 && *v > 0.0)
        .map(|(m, v)| m * v * (v / mean).ln())
        .sum()
}

/// Exact entropy of a step function.
pub fn entropy_step(f: &StepFunction, measure: &TailMeasure1D) -> f64 {
    let pieces: Vec<(f64, f64)> = f.pieces().map(|(a, b, v)| (measure.mass_between(a, b), v)).collect();
    entropy_from_pieces(&pieces)
}

// Composite Gauss-Legendre over tail levels s ∈ (0, 1): visits (x(s), weight).
fn for_each_level<F: FnMut(f64, f64, f64)>(measure: &TailMeasure1D, mut visit: F) {
    let rule = gauss_legendre(PANEL_ORDER);
    let h = 1.0 / PANELS as f64;
    for p in 0..PANELS {
        let mid = (p as f64 + 0.5) * h;
        for (node, w) in rule.iter() {
            let s = mid + 0.5 * h * node;
            visit(measure.point_with_tail(s), s, 0.5 * h * w);
        }
    }
}

fn checked(value: f64, at: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NonFinite { value, index: 0 });
    }
    if value < 0.0 {
        return Err(Error::HypothesisViolated(format!("f({at}) = {value} is negative")));
    }
    Ok(value)
}

/// Entropy of a general nonnegative `f`. Exact on discrete measures; on
/// continuous ones a composite Gauss-Legendre rule over tail levels, accurate
/// to [`QUADRATURE_TOLERANCE`] for bounded smooth `f`. A jump inside a panel
/// costs up to the panel width (`1/4096`) times the jump.
pub fn entropy_fn<F: Fn(f64) -> f64>(f: F, measure: &TailMeasure1D) -> Result<(f64, Method)> {
    match measure {
        TailMeasure1D::Discrete(d) => {
            let mut pieces = Vec::with_capacity(d.locations.len());
            for (x, m) in d.locations.iter().zip(&d.masses) {
                pieces.push((*m, checked(f(*x), *x)?));
            }
            Ok((entropy_from_pieces(&pieces), Method::ClosedForm))
        }
        continuous => {
            let mut values = Vec::with_capacity(PANELS * PANEL_ORDER);
            let mut err = None;
            for_each_level(continuous, |x, _, w| match checked(f(x), x) {
                Ok(v) => values.push((w, v)),
                Err(e) => {
                    err.get_or_insert(e);
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            Ok((entropy_from_pieces(&values), level_method()))
        }
    }
}

fn level_method() -> Method {
    Method::Quadrature {
        order: PANELS * PANEL_ORDER,
    }
}

/// Right side of the tail inequality for a step function, exactly.
///
/// On an interval `[a, b)` of a continuous measure, with `s = μ((x, ∞))`,
/// `∫ (1 + ln s) dμ = [s ln s]` from `s(b)` up to `s(a)`, so the right side
/// is `Σ v_i (φ(s(x_{i+1})) - φ(s(x_i)))` with `φ(s) = s ln s`. On discrete
/// measures the top atom has empty tail and contributes `+∞` unless `f`
/// vanishes there.
pub fn lemma_1d_rhs(f: &StepFunction, measure: &TailMeasure1D) -> f64 {
    match measure {
        TailMeasure1D::Discrete(d) => {
            let mut acc = 0.0;
            for ((x, m), above) in d.locations.iter().zip(&d.masses).zip(&d.above) {
                let weight = f.eval(*x) * m;
                if weight == 0.0 {
                    continue;
                }
                if *above <= 0.0 {
                    return f64::INFINITY;
                }
                acc -= weight * (1.0 + above.ln());
            }
            acc
        }
        continuous => f
            .pieces()
            .map(|(a, b, v)| v * (xlogx(continuous.tail(b)) - xlogx(continuous.tail(a))))
            .sum(),
    }
}

/// Checks the tail inequality for a step function with the exact oracle.
pub fn check_lemma_1d(f: &StepFunction, measure: &TailMeasure1D) -> EntropyReport {
    let lhs = entropy_step(f, measure);
    let rhs = lemma_1d_rhs(f, measure);
    EntropyReport::deterministic(lhs, rhs, Method::ClosedForm, EXACT_TOLERANCE * f.max_value().max(1.0))
}

/// The tail inequality for a general bounded nondecreasing `f`. Monotonicity
/// is checked on the evaluation points.
pub fn check_lemma_1d_general<F: Fn(f64) -> f64>(f: F, measure: &TailMeasure1D) -> Result<EntropyReport> {
    match measure {
        TailMeasure1D::Discrete(d) => {
            let values: Vec<f64> = d
                .locations
                .iter()
                .map(|x| checked(f(*x), *x))
                .collect::<Result<_>>()?;
            if values.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::HypothesisViolated("f is not nondecreasing".into()));
            }
            let step = StepFunction::new(d.locations[1..].to_vec(), values)?;
            // f agrees with this step function on every atom
            Ok(check_lemma_1d(&step, measure))
        }
        continuous => {
            // Visit levels from s = 1 down to 0, i.e. increasing x.
            let mut points = Vec::with_capacity(PANELS * PANEL_ORDER);
            for_each_level(continuous, |x, s, w| points.push((x, s, w)));
            points.reverse();
            let mut pieces = Vec::with_capacity(points.len());
            let mut rhs = 0.0;
            let mut last = 0.0;
            let mut bound = 0.0f64;
            for (x, s, w) in points {
                let v = checked(f(x), x)?;
                if v < last {
                    return Err(Error::HypothesisViolated(format!("f decreases at x = {x}")));
                }
                last = v;
                bound = bound.max(v);
                pieces.push((w, v));
                rhs -= w * v * (1.0 + s.ln());
            }
            let lhs = entropy_from_pieces(&pieces);
            let mut report = EntropyReport::deterministic(lhs, rhs, level_method(), QUADRATURE_TOLERANCE * bound.max(1.0));
            report.holds = report.slack >= -report.tolerance;
            Ok(report)
        }
    }
}

// ---------------------------------------------------------------------------
// Multidimensional functions

type RadialEval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum RadialKind {
    Constant(f64),
    /// `1 - 1_K`, nondecreasing because `K` is downward closed in the moduli.
    Complement(Body),
    Eval(RadialEval),
}

/// A bounded function of the moduli `(|z₁|, …, |z_n|)` under `ν_n`, or of
/// `(|x₁|, …, |x_n|)` under `λ_n`, nondecreasing in each coordinate.
#[derive(Clone)]
pub struct MonotoneRadialFunction {
    name: String,
    measure: MeasureKind,
    bound: f64,
    kind: RadialKind,
}

impl fmt::Debug for MonotoneRadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneRadialFunction")
            .field("name", &self.name)
            .field("measure", &self.measure)
            .field("bound", &self.bound)
            .finish()
    }
}

fn check_product_measure(measure: MeasureKind) -> Result<usize> {
    match measure {
        MeasureKind::ComplexGaussian { n } | MeasureKind::Exponential { n } => Ok(n),
        other => Err(Error::param(
            "measure",
            format!("multidimensional entropy needs ν_n or λ_n, got {other}"),
        )),
    }
}

impl MonotoneRadialFunction {
    pub fn new<F>(name: impl Into<String>, measure: MeasureKind, bound: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        check_product_measure(measure)?;
        if !(bound >= 0.0 && bound.is_finite()) {
            return Err(Error::param("bound", "must be finite and nonnegative"));
        }
        Ok(MonotoneRadialFunction {
            name: name.into(),
            measure,
            bound,
            kind: RadialKind::Eval(Arc::new(f)),
        })
    }

    pub fn constant(measure: MeasureKind, c: f64) -> Result<Self> {
        check_product_measure(measure)?;
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::param("c", "must be finite and nonnegative"));
        }
        Ok(MonotoneRadialFunction {
            name: format!("const:{c}"),
            measure,
            bound: c,
            kind: RadialKind::Constant(c),
        })
    }

    /// `g = 1 - 1_K` under the natural measure of `K`.
    pub fn complement(body: &Body) -> Self {
        MonotoneRadialFunction {
            name: format!("1-1[{body}]"),
            measure: body.natural_measure(),
            bound: 1.0,
            kind: RadialKind::Complement(body.clone()),
        }
    }

    /// `g(r) = Π h_k(r_k)`.
    pub fn product_of_steps(measure: MeasureKind, factors: Vec<StepFunction>) -> Result<Self> {
        let n = check_product_measure(measure)?;
        if factors.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: factors.len(),
            });
        }
        let bound = factors.iter().map(StepFunction::max_value).product();
        let name = factors.iter().map(ToString::to_string).collect::<Vec<_>>().join(" x ");
        Self::new(name, measure, bound, move |r| {
            factors.iter().zip(r).map(|(h, x)| h.eval(*x)).product()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn measure(&self) -> MeasureKind {
        self.measure
    }

    pub fn dim(&self) -> usize {
        self.measure.dim()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn eval(&self, r: &[f64]) -> f64 {
        match &self.kind {
            RadialKind::Constant(c) => *c,
            RadialKind::Complement(Body::Reinhardt(b)) => f64::from(u8::from(!b.shadow_member(r))),
            RadialKind::Complement(Body::Unconditional(b)) => f64::from(u8::from(!b.member(r))),
            RadialKind::Eval(f) => f(r),
        }
    }

    /// Samples `samples` points and a coordinatewise increase of each, and
    /// checks `0 ≤ g ≤ bound` and `g(r) ≤ g(r')`.
    pub fn check_hypotheses(&self, samples: usize, seed: u64) -> Result<()> {
        let n = self.dim();
        let eps = 1e-12 * self.bound.max(1.0);
        let stream = SampleStream::new(seed, 0x4D4F_4E4F);
        let mut r = vec![0.0; n];
        for i in 0..samples as u64 {
            let mut reader = stream.at(i).reader(2 * n as u64 + 2);
            for slot in r.iter_mut() {
                *slot = from_u(self.measure, -reader.next_open01().ln());
            }
            let k = (reader.next_u64() % n as u64) as usize;
            let mut bigger = r.clone();
            bigger[k] += -reader.next_open01().ln();
            let (a, b) = (self.eval(&r), self.eval(&bigger));
            for (v, at) in [(a, &r), (b, &bigger)] {
                if !(v >= -eps && v <= self.bound + eps) {
                    return Err(Error::HypothesisViolated(format!(
                        "{}: value {v} at {at:?} outside [0, {}]",
                        self.name, self.bound
                    )));
                }
            }
            if a > b + eps {
                return Err(Error::HypothesisViolated(format!(
                    "{}: not nondecreasing in coordinate {}: g({r:?}) = {a} > g({bigger:?}) = {b}",
                    self.name,
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

/// Modulus from the exponential variable `u`: `√(2u)` under `ν_n`, `u`
/// under `λ_n`.
#[inline]
fn from_u(measure: MeasureKind, u: f64) -> f64 {
    match measure {
        MeasureKind::ComplexGaussian { .. } => (2.0 * u).sqrt(),
        _ => u,
    }
}

#[inline]
fn to_u(measure: MeasureKind, r: f64) -> f64 {
    match measure {
        MeasureKind::ComplexGaussian { .. } => r * r / 2.0,
        _ => r,
    }
}

fn check_value(name: &str, v: f64, bound: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::NonFinite { value: v, index: 0 });
    }
    if v < -1e-12 * bound.max(1.0) {
        return Err(Error::HypothesisViolated(format!("{name} takes the negative value {v}")));
    }
    Ok(v.max(0.0))
}

fn check_quadrature_args(n: usize, order: usize) -> Result<()> {
    if n > MAX_QUADRATURE_DIM {
        return Err(Error::param(
            "n",
            format!("tensor quadrature is limited to n ≤ {MAX_QUADRATURE_DIM}, got {n}"),
        ));
    }
    if order < 2 {
        return Err(Error::param("order", "order must be at least 2"));
    }
    Ok(())
}

/// Values of `g` on the tensor Gauss-Laguerre grid in `u`-space, in
/// mixed-radix order with coordinate 0 fastest, plus the 1-D rule.
fn tensor_grid(g: &MonotoneRadialFunction, order: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = g.dim();
    check_quadrature_args(n, order)?;
    let rule = gauss_laguerre(order);
    let total = order.pow(n as u32);
    let mut values = Vec::with_capacity(total);
    let mut r = vec![0.0; n];
    for flat in 0..total {
        let mut rest = flat;
        for slot in r.iter_mut() {
            *slot = from_u(g.measure, rule.nodes[rest % order]);
            rest /= order;
        }
        values.push(check_value(&g.name, g.eval(&r), g.bound)?);
    }
    Ok((values, rule.nodes, rule.weights))
}

fn grid_weight(flat: usize, n: usize, weights: &[f64], skip: Option<usize>) -> f64 {
    let order = weights.len();
    let mut rest = flat;
    let mut w = 1.0;
    for k in 0..n {
        if Some(k) != skip {
            w *= weights[rest % order];
        }
        rest /= order;
    }
    w
}

fn grid_u_sum(flat: usize, n: usize, nodes: &[f64]) -> f64 {
    let order = nodes.len();
    let mut rest = flat;
    let mut s = 0.0;
    for _ in 0..n {
        s += nodes[rest % order];
        rest /= order;
    }
    s
}

/// `Ent g ≤ ∫ g (Σ u_k - n)` for `g` under `ν_n` (`u_k = |z_k|²/2`) or
/// `λ_n` (`u_k = |x_k|`).
///
/// Engines: closed forms for constants and complements of bodies with a
/// closed-form measure and moment; tensor quadrature in `u`; Monte Carlo
/// with a delta-method standard error on the slack.
pub fn check_lemma_multidim(g: &MonotoneRadialFunction, engine: Engine) -> Result<EntropyReport> {
    g.check_hypotheses(HYPOTHESIS_SAMPLES, 0x5EED)?;
    let n = g.dim();
    let nf = n as f64;
    let exact = || -> Option<(f64, f64)> {
        match &g.kind {
            RadialKind::Constant(_) => Some((0.0, 0.0)),
            RadialKind::Complement(body) => {
                let (m, moment) = body.exact_measure_and_moment()?;
                let rhs = match body {
                    // ∫_{K^c} (|z|²/2 - n) dν_n = n m - S/2
                    Body::Reinhardt(_) => nf * m - moment / 2.0,
                    // ∫_{K^c} (|x|₁ - n) dλ_n = n m - M
                    Body::Unconditional(_) => nf * m - moment,
                };
                Some((-xlogx(1.0 - m), rhs))
            }
            RadialKind::Eval(_) => None,
        }
    };
    match engine {
        Engine::Exact => {
            let (lhs, rhs) = exact().ok_or_else(|| Error::NoClosedForm(g.name.clone()))?;
            Ok(EntropyReport::deterministic(lhs, rhs, Method::ClosedForm, DETERMINISTIC_TOLERANCE))
        }
        Engine::Auto { samples, seed } => match exact() {
            Some((lhs, rhs)) => Ok(EntropyReport::deterministic(lhs, rhs, Method::ClosedForm, DETERMINISTIC_TOLERANCE)),
            None => check_lemma_multidim(g, Engine::MonteCarlo { samples, seed }),
        },
        Engine::Quadrature { order } => {
            let (values, nodes, weights) = tensor_grid(g, order)?;
            let (mut mean, mut mean_xlogx, mut rhs) = (0.0, 0.0, 0.0);
            for (flat, v) in values.iter().enumerate() {
                let w = grid_weight(flat, n, &weights, None);
                mean += w * v;
                mean_xlogx += w * xlogx(*v);
                rhs += w * v * (grid_u_sum(flat, n, &nodes) - nf);
            }
            let lhs = mean_xlogx - xlogx(mean);
            Ok(EntropyReport::deterministic(lhs, rhs, Method::Quadrature { order }, DETERMINISTIC_TOLERANCE))
        }
        Engine::MonteCarlo { samples, seed } => {
            let measure = g.measure;
            let stats = monte_carlo(measure, SampleView::Radial, samples, seed, 0, 3, |r, out| {
                let v = g.eval(r);
                let u: f64 = r.iter().map(|x| to_u(measure, *x)).sum();
                out[0] = v;
                out[1] = xlogx(v.max(0.0));
                out[2] = v * (u - nf);
            })?;
            let (mean, mean_xlogx, rhs) = (stats.mean(0), stats.mean(1), stats.mean(2));
            let lhs = mean_xlogx - xlogx(mean);
            let dphi = if mean > 0.0 { mean.ln() + 1.0 } else { 0.0 };
            let lhs_se = stats.std_error_of(&[-dphi, 1.0, 0.0]);
            let rhs_se = stats.std_error_of(&[0.0, 0.0, 1.0]);
            let slack_se = stats.std_error_of(&[dphi, -1.0, 1.0]);
            let method = Method::MonteCarlo { samples, seed };
            let slack = rhs - lhs;
            let tolerance = SE_MULTIPLIER * slack_se;
            Ok(EntropyReport {
                lhs,
                lhs_std_error: lhs_se,
                lhs_method: method,
                rhs,
                rhs_std_error: rhs_se,
                rhs_method: method,
                slack,
                slack_std_error: slack_se,
                tolerance,
                holds: slack >= -tolerance,
            })
        }
    }
}

/// Subadditivity of entropy on the product measure:
///
/// ```text
/// Ent g ≤ Σ_k ∫ Ent_μ(g with r_k free) dμ^{⊗(n-1)}(r^k)
/// ```
///
/// The quadrature engine evaluates both sides on the tensor Gauss-Laguerre
/// product measure, where the inequality is again a theorem, so the check is
/// exact up to rounding. The Monte Carlo engine averages over outer samples
/// and integrates each free coordinate with a probability-space midpoint
/// rule of [`SUBADDITIVITY_INNER_NODES`] points; the midpoint bias is
/// bounded and added to the tolerance. The automatic engine uses quadrature
/// of order [`DEFAULT_QUADRATURE_ORDER`] for `n ≤ 4`.
pub fn check_subadditivity(g: &MonotoneRadialFunction, engine: Engine) -> Result<EntropyReport> {
    g.check_hypotheses(HYPOTHESIS_SAMPLES, 0x5EED)?;
    let n = g.dim();
    let nf = n as f64;
    match engine {
        Engine::Exact => Err(Error::NoClosedForm(format!("subadditivity of {}", g.name))),
        Engine::Auto { samples, seed } => {
            if n <= MAX_QUADRATURE_DIM {
                check_subadditivity(g, Engine::Quadrature { order: DEFAULT_QUADRATURE_ORDER })
            } else {
                check_subadditivity(g, Engine::MonteCarlo { samples, seed })
            }
        }
        Engine::Quadrature { order } => {
            let (values, _, weights) = tensor_grid(g, order)?;
            let (mut mean, mut mean_xlogx) = (0.0, 0.0);
            for (flat, v) in values.iter().enumerate() {
                let w = grid_weight(flat, n, &weights, None);
                mean += w * v;
                mean_xlogx += w * xlogx(*v);
            }
            // Σ_k E_{r^k} φ(M_k(r^k)), M_k the average over coordinate k.
            let mut coordinate_terms = 0.0;
            let mut stride = 1;
            for k in 0..n {
                for flat in 0..values.len() {
                    if (flat / stride) % order != 0 {
                        continue;
                    }
                    let m_k: f64 = (0..order).map(|j| weights[j] * values[flat + j * stride]).sum();
                    coordinate_terms += grid_weight(flat, n, &weights, Some(k)) * xlogx(m_k);
                }
                stride *= order;
            }
            let lhs = mean_xlogx - xlogx(mean);
            let rhs = nf * mean_xlogx - coordinate_terms;
            Ok(EntropyReport::deterministic(lhs, rhs, Method::Quadrature { order }, DETERMINISTIC_TOLERANCE))
        }
        Engine::MonteCarlo { samples, seed } => {
            let measure = g.measure;
            let inner = SUBADDITIVITY_INNER_NODES;
            let outer = (samples / (n * inner) as u64).max(64);
            let inner_points: Vec<f64> = (0..inner)
                .map(|j| from_u(measure, -(1.0 - (j as f64 + 0.5) / inner as f64).ln()))
                .collect();
            let stats = monte_carlo(measure, SampleView::Radial, outer, seed, 0, 3, |r, out| {
                let v = g.eval(r).max(0.0);
                out[0] = v;
                out[1] = xlogx(v);
                let mut point = r.to_vec();
                let mut acc = 0.0;
                for k in 0..r.len() {
                    let mut m = 0.0;
                    for x in &inner_points {
                        point[k] = *x;
                        m += g.eval(&point).max(0.0);
                    }
                    point[k] = r[k];
                    acc += xlogx(m / inner as f64);
                }
                out[2] = acc;
            })?;
            let (mean, mean_xlogx, coordinate_terms) = (stats.mean(0), stats.mean(1), stats.mean(2));
            let lhs = mean_xlogx - xlogx(mean);
            let rhs = nf * mean_xlogx - coordinate_terms;
            let dphi = if mean > 0.0 { mean.ln() + 1.0 } else { 0.0 };
            let lhs_se = stats.std_error_of(&[-dphi, 1.0, 0.0]);
            let rhs_se = stats.std_error_of(&[0.0, nf, -1.0]);
            let slack_se = stats.std_error_of(&[dphi, nf - 1.0, -1.0]);
            // A monotone function's midpoint average over N tail levels is
            // off by at most B/N; φ moves by at most h(2 + |ln h| + |ln B|)
            // over such a step.
            let b = g.bound.max(f64::MIN_POSITIVE);
            let h = b / inner as f64;
            let bias = nf * h * (2.0 + h.ln().abs() + b.ln().abs());
            let method = Method::MonteCarlo { samples: outer, seed };
            let slack = rhs - lhs;
            let tolerance = SE_MULTIPLIER * slack_se + bias;
            Ok(EntropyReport {
                lhs,
                lhs_std_error: lhs_se,
                lhs_method: method,
                rhs,
                rhs_std_error: rhs_se,
                rhs_method: method,
                slack,
                slack_std_error: slack_se,
                tolerance,
                holds: slack >= -tolerance,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::ReinhardtBody;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    const HALF_LN2: f64 = 0.346_573_590_279_972_6;

    fn gauss(n: usize) -> MeasureKind {
        MeasureKind::ComplexGaussian { n }
    }

    #[test]
    fn step_function_validation() {
        assert!(StepFunction::new(vec![1.0, 2.0], vec![0.0, 1.0]).is_err());
        assert!(StepFunction::new(vec![2.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
        assert!(StepFunction::new(vec![1.0], vec![2.0, 1.0]).is_err());
        assert!(StepFunction::new(vec![-1.0], vec![0.0, 1.0]).is_err());
        let f = StepFunction::new(vec![1.0, 2.0], vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.eval(5.0), 3.0);
        assert_eq!(StepFunction::parse(&f.to_string()).unwrap(), f);
        assert_eq!(StepFunction::parse("step:v=2").unwrap(), StepFunction::constant(2.0).unwrap());
    }

    #[test]
    fn measure_parsing_and_tails() {
        let d = TailMeasure1D::parse("atoms:x=1,0,w=0.25,0.75").unwrap();
        assert_eq!(d.to_string(), "atoms:x=0,1,w=0.75,0.25");
        assert_eq!(d.tail(-1.0), 1.0);
        assert_eq!(d.tail(0.0), 0.25);
        assert_eq!(d.tail(1.0), 0.0);
        assert!(TailMeasure1D::discrete(vec![0.0], vec![0.5]).is_err());
        assert_eq!(TailMeasure1D::parse("exp").unwrap(), TailMeasure1D::Exponential1d);
        assert_eq!(TailMeasure1D::parse("radial").unwrap(), TailMeasure1D::RadialMu);
    }

    #[test]
    fn entropy_examples() {
        for m in [TailMeasure1D::RadialMu, TailMeasure1D::Exponential1d] {
            assert!(entropy_step(&StepFunction::constant(3.0).unwrap(), &m).abs() < 1e-15);
        }
        // indicator of a set of measure 1/2
        let f = StepFunction::tail_indicator(LN_2).unwrap();
        let e = entropy_step(&f, &TailMeasure1D::Exponential1d);
        assert!((e - HALF_LN2).abs() < 1e-15);
        // uniform on {0, 1}, f = (1, 2)
        let d = TailMeasure1D::discrete(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let f = StepFunction::new(vec![1.0], vec![1.0, 2.0]).unwrap();
        let expected = LN_2 - 1.5 * 1.5f64.ln();
        assert!((entropy_step(&f, &d) - expected).abs() < 1e-15);
        assert!((expected - 0.084_949_52).abs() < 1e-8);
        let (general, method) = entropy_fn(|x| f.eval(x), &d).unwrap();
        assert_eq!(general, entropy_step(&f, &d));
        assert_eq!(method, Method::ClosedForm);
    }

    #[test]
    fn general_entropy_matches_step_oracle_and_smooth_values() {
        let f = StepFunction::new(vec![0.5, 1.3], vec![0.2, 1.0, 1.7]).unwrap();
        for m in [TailMeasure1D::RadialMu, TailMeasure1D::Exponential1d] {
            // jumps fall inside panels, so steps converge only like the panel width
            let (q, _) = entropy_fn(|x| f.eval(x), &m).unwrap();
            assert!((q - entropy_step(&f, &m)).abs() < 1e-3);
        }
        // f = 1 - e^{-x} under Exp(1) is uniform on (0, 1): E[f ln f] = -1/4.
        let (q, _) = entropy_fn(|x: f64| -(-x).exp_m1(), &TailMeasure1D::Exponential1d).unwrap();
        assert!((q - (-0.25 + 0.5 * LN_2)).abs() < QUADRATURE_TOLERANCE, "{q}");
        assert!(entropy_fn(|x| x - 1.0, &TailMeasure1D::Exponential1d).is_err());
    }

    #[test]
    fn inverse_tail_examples() {
        let delta = TailMeasure1D::point_mass(1.0).unwrap();
        assert_eq!(inverse_tail(&delta, 0.5).unwrap(), 1.0);
        assert_eq!(inverse_tail(&delta, 1.0).unwrap(), 0.0);
        let h = inverse_tail(&TailMeasure1D::RadialMu, (-2.0f64).exp()).unwrap();
        assert!((h - 2.0).abs() < 1e-14);
        assert_eq!(inverse_tail(&TailMeasure1D::Exponential1d, 0.0).unwrap(), f64::INFINITY);
        assert!(inverse_tail(&delta, 1.5).is_err());
    }

    #[test]
    fn lemma_1d_equality_for_tail_indicators() {
        for s in [0.25, 0.5, 0.75] {
            let target = -xlogx(s);
            for (m, a) in [
                (TailMeasure1D::Exponential1d, -f64::ln(s)),
                (TailMeasure1D::RadialMu, (-2.0 * f64::ln(s)).sqrt()),
            ] {
                let r = check_lemma_1d(&StepFunction::tail_indicator(a).unwrap(), &m);
                assert!((r.lhs - target).abs() < 1e-12);
                assert!((r.rhs - target).abs() < 1e-12);
                assert!(r.holds);
            }
        }
    }

    #[test]
    fn lemma_1d_constant_and_discrete() {
        let c = StepFunction::constant(2.0).unwrap();
        for m in [TailMeasure1D::RadialMu, TailMeasure1D::Exponential1d] {
            let r = check_lemma_1d(&c, &m);
            assert!(r.lhs.abs() < 1e-15);
            assert!(r.rhs >= 0.0);
            // -c ∫ (1 + ln s) ds over (0, 1) = 0
            assert!(r.rhs.abs() < 1e-15);
        }
        let d = TailMeasure1D::discrete(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let r = check_lemma_1d(&StepFunction::new(vec![1.0], vec![1.0, 2.0]).unwrap(), &d);
        assert_eq!(r.rhs, f64::INFINITY);
        assert!(r.holds);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"rhs\":\"inf\""), "{json}");
        // f vanishing on the top atom keeps the right side finite
        let r = check_lemma_1d(&StepFunction::constant(0.0).unwrap(), &d);
        assert_eq!(r.rhs, 0.0);
    }

    #[test]
    fn lemma_1d_general_agrees_with_exact() {
        let f = StepFunction::new(vec![0.4, 2.0], vec![0.5, 1.0, 4.0]).unwrap();
        for m in [TailMeasure1D::RadialMu, TailMeasure1D::Exponential1d] {
            let exact = check_lemma_1d(&f, &m);
            let general = check_lemma_1d_general(|x| f.eval(x), &m).unwrap();
            assert!((exact.lhs - general.lhs).abs() < 1e-3);
            assert!((exact.rhs - general.rhs).abs() < 1e-3, "{} {}", exact.rhs, general.rhs);
            assert!(general.holds);
        }
        let smooth = check_lemma_1d_general(|x: f64| 1.0 - (-x).exp(), &TailMeasure1D::Exponential1d).unwrap();
        assert!(smooth.holds && smooth.slack > 0.0);
        assert!(check_lemma_1d_general(|x: f64| (-x).exp(), &TailMeasure1D::Exponential1d).is_err());
    }

    #[test]
    fn multidim_examples() {
        let one = MonotoneRadialFunction::constant(gauss(2), 1.0).unwrap();
        for engine in [Engine::Exact, Engine::Quadrature { order: 16 }] {
            let r = check_lemma_multidim(&one, engine).unwrap();
            assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12, "{r:?}");
        }
        let c: Body = ReinhardtBody::cylinder((2.0 * LN_2).sqrt(), 1).unwrap().into();
        let r = check_lemma_multidim(&MonotoneRadialFunction::complement(&c), Engine::Exact).unwrap();
        assert!((r.lhs - HALF_LN2).abs() < 1e-12);
        assert!((r.rhs - HALF_LN2).abs() < 1e-12);
        assert!(r.holds);
        let pd: Body = ReinhardtBody::polydisc(vec![1.0, 1.0]).unwrap().into();
        let g = MonotoneRadialFunction::complement(&pd);
        let r = check_lemma_multidim(&g, Engine::Exact).unwrap();
        assert!(r.slack > 1e-3, "{r:?}");
        let mc = check_lemma_multidim(&g, Engine::MonteCarlo { samples: 400_000, seed: 9 }).unwrap();
        assert!(mc.holds);
        assert!((mc.slack - r.slack).abs() < 4.0 * mc.slack_std_error, "{mc:?} vs {r:?}");
    }

    #[test]
    fn multidim_quadrature_on_smooth_function() {
        // g = 1 - e^{-u₁-u₂} in u-space.
        let g = MonotoneRadialFunction::new("smooth", gauss(2), 1.0, |r| {
            1.0 - (-(r[0] * r[0] + r[1] * r[1]) / 2.0).exp()
        })
        .unwrap();
        let q = check_lemma_multidim(&g, Engine::Quadrature { order: 24 }).unwrap();
        let mc = check_lemma_multidim(&g, Engine::MonteCarlo { samples: 400_000, seed: 4 }).unwrap();
        // E[e^{-u}] = 1/2 and E[u e^{-u}] = 1/4, so
        // E[g (u₁ + u₂ - 2)] = 0 - (2·(1/4)(1/2) - 2·(1/4)) = 1/4.
        assert!((q.rhs - 0.25).abs() < 1e-10, "{q:?}");
        assert!(q.holds && mc.holds);
        assert!((q.lhs - mc.lhs).abs() < 4.0 * mc.lhs_std_error + 1e-9);
    }

    #[test]
    fn multidim_rejects_non_monotone() {
        let g = MonotoneRadialFunction::new("bump", gauss(1), 1.0, |r| (-r[0] * r[0]).exp()).unwrap();
        assert!(matches!(
            check_lemma_multidim(&g, Engine::Quadrature { order: 8 }),
            Err(Error::HypothesisViolated(_))
        ));
        let upward = ReinhardtBody::custom("upward", 1, |r: &[f64]| r[0] >= 1.0).unwrap();
        let g = MonotoneRadialFunction::complement(&upward.into());
        assert!(check_lemma_multidim(&g, Engine::Quadrature { order: 8 }).is_err());
    }

    #[test]
    fn subadditivity_examples() {
        let one = MonotoneRadialFunction::constant(gauss(3), 2.0).unwrap();
        let r = check_subadditivity(&one, Engine::Quadrature { order: 8 }).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);

        let ind = StepFunction::tail_indicator(1.0).unwrap();
        let prod = MonotoneRadialFunction::product_of_steps(
            gauss(2),
            vec![ind.clone(), StepFunction::tail_indicator(0.5).unwrap()],
        )
        .unwrap();
        // Ent(h₁ ⊗ h₂) = E h₂ Ent h₁ + E h₁ Ent h₂, so products are equality cases
        let r = check_subadditivity(&prod, Engine::Quadrature { order: 32 }).unwrap();
        assert!(r.holds && r.slack.abs() < 1e-12, "{r:?}");

        let first = MonotoneRadialFunction::product_of_steps(
            gauss(3),
            vec![ind, StepFunction::constant(1.0).unwrap(), StepFunction::constant(1.0).unwrap()],
        )
        .unwrap();
        let r = check_subadditivity(&first, Engine::Quadrature { order: 12 }).unwrap();
        assert!(r.slack.abs() < 1e-12, "{r:?}");
        let mc = check_subadditivity(&first, Engine::MonteCarlo { samples: 200_000, seed: 3 }).unwrap();
        assert!(mc.holds, "{mc:?}");
    }

    #[test]
    fn subadditivity_on_body_complements() {
        let lp: Body = ReinhardtBody::weighted_lp(1.0, vec![1.0, 2.0], 2.0).unwrap().into();
        let g = MonotoneRadialFunction::complement(&lp);
        let q = check_subadditivity(&g, Engine::Auto { samples: 0, seed: 0 }).unwrap();
        assert!(q.holds, "{q:?}");
        let mc = check_subadditivity(&g, Engine::MonteCarlo { samples: 300_000, seed: 5 }).unwrap();
        assert!(mc.holds, "{mc:?}");
    }

    fn arb_step() -> impl Strategy<Value = StepFunction> {
        (0usize..6)
            .prop_flat_map(|m| {
                (
                    proptest::collection::vec(0.0f64..4.0, m),
                    proptest::collection::vec(0.0f64..3.0, m + 1),
                )
            })
            .prop_filter_map("distinct jumps", |(mut x, mut v)| {
                x.sort_by(f64::total_cmp);
                x.dedup();
                v.sort_by(f64::total_cmp);
                v.truncate(x.len() + 1);
                StepFunction::new(x, v).ok()
            })
    }

    fn arb_measure() -> impl Strategy<Value = TailMeasure1D> {
        prop_oneof![
            Just(TailMeasure1D::RadialMu),
            Just(TailMeasure1D::Exponential1d),
            proptest::collection::vec((0.0f64..5.0, 0.01f64..1.0), 1..6).prop_map(|atoms| {
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                let (x, mut w): (Vec<f64>, Vec<f64>) = atoms.into_iter().map(|(x, w)| (x, w / total)).unzip();
                let s: f64 = w.iter().sum();
                w[0] += 1.0 - s;
                TailMeasure1D::discrete(x, w).unwrap()
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn lemma_1d_slack_is_nonnegative(f in arb_step(), m in arb_measure()) {
            let r = check_lemma_1d(&f, &m);
            prop_assert!(r.lhs >= -1e-14);
            prop_assert!(r.holds, "{f} {m} {r:?}");
        }

        #[test]
        fn entropy_is_homogeneous(f in arb_step(), m in arb_measure(), c in 0.01f64..50.0) {
            let a = entropy_step(&f.scaled(c).unwrap(), &m);
            let b = c * entropy_step(&f, &m);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }

        #[test]
        fn inverse_tail_is_nonincreasing_and_attains(m in arb_measure(), y1 in 0.0f64..=1.0, y2 in 0.0f64..=1.0) {
            let (lo, hi) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
            let h_lo = inverse_tail(&m, lo).unwrap();
            let h_hi = inverse_tail(&m, hi).unwrap();
            prop_assert!(h_lo >= h_hi);
            if h_lo.is_finite() {
                prop_assert!(m.tail(h_lo) <= lo * (1.0 + 1e-12) + 1e-15);
            }
        }
    }
}
