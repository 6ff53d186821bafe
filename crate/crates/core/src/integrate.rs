//! Integration against `ν_n`, `λ_n`, `μ` and the unit exponential:
//! reproducible Monte Carlo with standard errors, and tensor-product
//! Gauss-Laguerre quadrature for phase-invariant integrands in low dimension.
//!
//! Monte Carlo runs split the sample range into fixed-size chunks. Chunk `c`
//! reads counters `[c·CHUNK, (c+1)·CHUNK)` of the stream and the chunk sums
//! are combined in chunk order, so results are bit-identical for any thread
//! count.

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::measures::MeasureKind;
use crate::rng::{open01, SampleStream, StreamReader};
use crate::special::{gauss_laguerre, QuadratureRule};

/// Samples per work unit.
const CHUNK: u64 = 1 << 14;

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;
pub const MAX_QUADRATURE_DIM: usize = 4;
/// Slack tolerance on closed-form and quadrature paths.
pub const DETERMINISTIC_TOLERANCE: f64 = 1e-10;
/// Width of the Monte Carlo acceptance band in standard errors.
pub const SE_MULTIPLIER: f64 = 3.0;

/// How an [`Estimate`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature { order: usize },
    MonteCarlo { samples: u64, seed: u64 },
}

impl Method {
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, Method::MonteCarlo { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Method::ClosedForm => "closed-form".to_string(),
            Method::Quadrature { order } => format!("quadrature({order})"),
            Method::MonteCarlo { samples, seed } => format!("mc({samples},{seed})"),
        }
    }
}

/// A numerical value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
    pub samples: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            std_error: 0.0,
            method: Method::ClosedForm,
            samples: 0,
        }
    }

    pub fn quadrature(value: f64, order: usize, evaluations: u64) -> Self {
        Estimate {
            value,
            std_error: 0.0,
            method: Method::Quadrature { order },
            samples: evaluations,
        }
    }

    pub fn monte_carlo(value: f64, std_error: f64, samples: u64, seed: u64) -> Self {
        Estimate {
            value,
            std_error,
            method: Method::MonteCarlo { samples, seed },
            samples,
        }
    }

    /// `|value - target| ≤ k · std_error`.
    pub fn covers(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// Evaluation strategy for measures and integrals of bodies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "engine", rename_all = "kebab-case")]
pub enum Engine {
    /// Closed forms only; fails for bodies without one.
    Exact,
    /// Tensor Gauss-Laguerre quadrature, `n ≤ 4`.
    Quadrature { order: usize },
    MonteCarlo { samples: u64, seed: u64 },
    /// Closed form when available, Monte Carlo otherwise.
    Auto { samples: u64, seed: u64 },
}

impl Default for Engine {
    fn default() -> Self {
        Engine::Auto {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

impl Engine {
    /// The same engine with a different seed and sample count; deterministic
    /// engines are returned unchanged.
    pub fn reseeded(self, seed: u64, samples: u64) -> Self {
        match self {
            Engine::MonteCarlo { .. } => Engine::MonteCarlo { samples, seed },
            Engine::Auto { .. } => Engine::Auto { samples, seed },
            other => other,
        }
    }

    pub fn samples_and_seed(&self) -> Option<(u64, u64)> {
        match *self {
            Engine::MonteCarlo { samples, seed } | Engine::Auto { samples, seed } => Some((samples, seed)),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Sampling

/// What a Monte Carlo pass hands to the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleView {
    /// The full point: `2n` reals in ℂⁿ, `n` reals in ℝⁿ, one for 1-D measures.
    Point,
    /// Moduli `|z_k|` (complex Gaussian) or `|x_k|` (exponential). Reads the
    /// same stream words as [`SampleView::Point`] and skips the phase/sign.
    Radial,
}

fn words_per_sample(measure: MeasureKind) -> u64 {
    match measure {
        MeasureKind::ComplexGaussian { n } => 2 * n as u64,
        MeasureKind::Exponential { n } => n as u64,
        MeasureKind::RadialMu | MeasureKind::Exponential1d => 1,
    }
}

fn view_len(measure: MeasureKind, view: SampleView) -> usize {
    match view {
        SampleView::Point => measure.real_dim(),
        SampleView::Radial => measure.dim(),
    }
}

#[inline]
fn draw(measure: MeasureKind, view: SampleView, reader: &mut StreamReader, out: &mut [f64]) {
    match measure {
        MeasureKind::ComplexGaussian { n } => {
            for k in 0..n {
                // Box-Muller in polar form: |z_k|² = -2 ln u₁, arg z_k = 2π u₂.
                let radius = (-2.0 * reader.next_open01().ln()).sqrt();
                let angle = std::f64::consts::TAU * reader.next_open01();
                match view {
                    SampleView::Point => {
                        let (s, c) = angle.sin_cos();
                        out[2 * k] = radius * c;
                        out[2 * k + 1] = radius * s;
                    }
                    SampleView::Radial => out[k] = radius,
                }
            }
        }
        MeasureKind::Exponential { n } => {
            for slot in out.iter_mut().take(n) {
                let word = reader.next_u64();
                let magnitude = -open01(word).ln();
                *slot = match view {
                    SampleView::Point if word & 1 == 1 => -magnitude,
                    _ => magnitude,
                };
            }
        }
        MeasureKind::RadialMu => out[0] = (-2.0 * reader.next_open01().ln()).sqrt(),
        MeasureKind::Exponential1d => out[0] = -reader.next_open01().ln(),
    }
}

/// One point of `ν_n` in `(Re z₁, Im z₁, …)` order at the given stream
/// coordinates.
pub fn sample_complex_gaussian(n: usize, stream: SampleStream) -> Vec<f64> {
    let measure = MeasureKind::ComplexGaussian { n };
    let mut out = vec![0.0; 2 * n];
    draw(measure, SampleView::Point, &mut stream.reader(words_per_sample(measure)), &mut out);
    out
}

/// One point of `λ_n`: independent random signs times unit exponentials.
pub fn sample_exponential(n: usize, stream: SampleStream) -> Vec<f64> {
    let measure = MeasureKind::Exponential { n };
    let mut out = vec![0.0; n];
    draw(measure, SampleView::Point, &mut stream.reader(words_per_sample(measure)), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Monte Carlo accumulation

/// First and second sample moments of a vector-valued integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStats {
    pub count: u64,
    sums: Vec<f64>,
    // row-major k × k
    cross: Vec<f64>,
    pub seed: u64,
}

impl SampleStats {
    fn new(k: usize, seed: u64) -> Self {
        SampleStats {
            count: 0,
            sums: vec![0.0; k],
            cross: vec![0.0; k * k],
            seed,
        }
    }

    fn push(&mut self, values: &[f64]) {
        let k = self.sums.len();
        self.count += 1;
        for i in 0..k {
            self.sums[i] += values[i];
            for j in i..k {
                self.cross[i * k + j] += values[i] * values[j];
            }
        }
    }

    fn merge(&mut self, other: &SampleStats) {
        self.count += other.count;
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.cross.iter_mut().zip(&other.cross) {
            *a += b;
        }
    }

    pub fn width(&self) -> usize {
        self.sums.len()
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.sums[i] / self.count as f64
    }

    /// Sample covariance (denominator `N - 1`).
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        let k = self.sums.len();
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let n = self.count as f64;
        if self.count < 2 {
            return 0.0;
        }
        let raw = self.cross[a * k + b] - self.sums[a] * self.sums[b] / n;
        raw / (n - 1.0)
    }

    /// Estimate of `Σ c_i E[Y_i]` with standard error
    /// `√(cᵀ Σ c / N)`. Also the delta-method error of a smooth function of
    /// the means when `c` is its gradient.
    pub fn linear(&self, coefficients: &[f64]) -> (f64, f64) {
        let value = coefficients.iter().enumerate().map(|(i, c)| c * self.mean(i)).sum();
        (value, self.std_error_of(coefficients))
    }

    pub fn std_error_of(&self, gradient: &[f64]) -> f64 {
        let mut var = 0.0;
        for (i, ci) in gradient.iter().enumerate() {
            if *ci == 0.0 {
                continue;
            }
            for (j, cj) in gradient.iter().enumerate() {
                if *cj != 0.0 {
                    var += ci * cj * self.covariance(i, j);
                }
            }
        }
        (var.max(0.0) / self.count as f64).sqrt()
    }

    pub fn estimate(&self, i: usize) -> Estimate {
        let mut c = vec![0.0; self.width()];
        c[i] = 1.0;
        let (value, se) = self.linear(&c);
        Estimate::monte_carlo(value, se, self.count, self.seed)
    }
}

/// Runs a Monte Carlo pass computing `width` integrand components per
/// sample. `f` receives the sample view and writes its outputs.
pub fn monte_carlo<F>(
    measure: MeasureKind,
    view: SampleView,
    samples: u64,
    seed: u64,
    stream_index: u64,
    width: usize,
    f: F,
) -> Result<SampleStats>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    if samples == 0 {
        return Err(Error::param("samples", "at least one sample is required"));
    }
    let words = words_per_sample(measure);
    let len = view_len(measure, view);
    let chunks = samples.div_ceil(CHUNK);
    let base = SampleStream::new(seed, stream_index);
    let partials: Vec<Result<SampleStats>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(samples);
            let mut reader = base.at(start).reader(words);
            let mut point = vec![0.0; len];
            let mut out = vec![0.0; width];
            let mut stats = SampleStats::new(width, seed);
            for index in start..end {
                draw(measure, view, &mut reader, &mut point);
                f(&point, &mut out);
                if let Some(bad) = out.iter().find(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { value: *bad, index });
                }
                stats.push(&out);
            }
            Ok(stats)
        })
        .collect();
    let mut total = SampleStats::new(width, seed);
    for partial in partials {
        total.merge(&partial?);
    }
    Ok(total)
}

fn check_body_measure(body: &Body, measure: MeasureKind) -> Result<()> {
    let natural = body.natural_measure();
    match (natural, measure) {
        (MeasureKind::ComplexGaussian { n: a }, MeasureKind::ComplexGaussian { n: b })
        | (MeasureKind::Exponential { n: a }, MeasureKind::Exponential { n: b }) => {
            if a == b {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: b, actual: a })
            }
        }
        _ => Err(Error::FamilyMismatch(format!(
            "{body} cannot be evaluated under {measure}"
        ))),
    }
}

/// Indicator membership from a radial view.
#[inline]
fn radial_member(body: &Body, radii: &[f64]) -> bool {
    match body {
        Body::Reinhardt(b) => b.shadow_member(radii),
        // unconditional bodies are invariant under sign flips
        Body::Unconditional(b) => b.member(radii),
    }
}

/// Monte Carlo estimate of the measure of a body, binomial standard error.
pub fn mc_measure(body: &Body, measure: MeasureKind, samples: u64, seed: u64) -> Result<Estimate> {
    check_body_measure(body, measure)?;
    let stats = monte_carlo(measure, SampleView::Radial, samples, seed, 0, 1, |r, out| {
        out[0] = if radial_member(body, r) { 1.0 } else { 0.0 };
    })?;
    Ok(stats.estimate(0))
}

/// Monte Carlo estimate of `∫_K f dm` (or `∫ f dm` without a body). The
/// integrand receives full sample points.
pub fn mc_integral<F>(
    integrand: F,
    body: Option<&Body>,
    measure: MeasureKind,
    samples: u64,
    seed: u64,
) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if let Some(b) = body {
        check_body_measure(b, measure)?;
    }
    let stats = monte_carlo(measure, SampleView::Point, samples, seed, 0, 1, |x, out| {
        let inside = body.map_or(true, |b| b.contains(x).unwrap_or(false));
        out[0] = if inside { integrand(x) } else { 0.0 };
    })?;
    Ok(stats.estimate(0))
}

// ---------------------------------------------------------------------------
// Tensor quadrature

fn check_quadrature(n: usize, order: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", "dimension must be at least 1"));
    }
    if n > MAX_QUADRATURE_DIM {
        return Err(Error::param(
            "n",
            format!("tensor quadrature is limited to n ≤ {MAX_QUADRATURE_DIM}, got {n}"),
        ));
    }
    if order < 2 {
        return Err(Error::param("order", format!("order must be at least 2, got {order}")));
    }
    Ok(())
}

/// Gauss-Laguerre rule transported to the radial measure `μ` by `r = √(2u)`.
pub fn radial_rule(order: usize) -> QuadratureRule {
    let mut rule = gauss_laguerre(order);
    for x in rule.nodes.iter_mut() {
        *x = (2.0 * *x).sqrt();
    }
    rule
}

/// Gauss-Laguerre rule for the unit exponential on ℝ₊.
pub fn exponential_rule(order: usize) -> QuadratureRule {
    gauss_laguerre(order)
}

/// Visits every node of the `n`-fold product rule with its product weight.
pub fn for_each_tensor_node<F>(rule: &QuadratureRule, n: usize, mut visit: F)
where
    F: FnMut(&[f64], f64),
{
    let m = rule.len();
    let mut idx = vec![0usize; n];
    let mut point = vec![0.0; n];
    loop {
        let mut w = 1.0;
        for k in 0..n {
            point[k] = rule.nodes[idx[k]];
            w *= rule.weights[idx[k]];
        }
        visit(&point, w);
        let mut k = 0;
        loop {
            if k == n {
                return;
            }
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `∫ h dμ^{⊗n}` for an integrand of the moduli `(|z₁|, …, |z_n|)`, i.e.
/// `∫ h dν_n` for phase-invariant `h`.
///
/// Substituting `u = r²/2` per axis turns `μ` into the unit exponential, so
/// an `order`-point Gauss-Laguerre rule per axis integrates polynomials in
/// `u` of degree `< 2·order` exactly. Indicators are integrated only to the
/// size of the node weights next to the jump.
pub fn tensor_quadrature<F>(integrand: F, n: usize, order: usize) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64,
{
    check_quadrature(n, order)?;
    let rule = radial_rule(order);
    let mut acc = 0.0;
    for_each_tensor_node(&rule, n, |r, w| acc += w * integrand(r));
    Ok(Estimate::quadrature(acc, order, (order as u64).pow(n as u32)))
}

/// `∫ h dλ_n` for an integrand of `(|x₁|, …, |x_n|)`.
pub fn tensor_quadrature_exponential<F>(integrand: F, n: usize, order: usize) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64,
{
    check_quadrature(n, order)?;
    let rule = exponential_rule(order);
    let mut acc = 0.0;
    for_each_tensor_node(&rule, n, |x, w| acc += w * integrand(x));
    Ok(Estimate::quadrature(acc, order, (order as u64).pow(n as u32)))
}

// ---------------------------------------------------------------------------
// Body-level evaluation

/// `(measure, moment)` of a body under its natural measure, where the moment
/// is `∫_K |z|² dν_n` (Reinhardt) or `∫_K |x|₁ dλ_n` (unconditional).
#[derive(Debug, Clone)]
pub enum BodyEvaluation {
    Exact { measure: f64, moment: f64 },
    Quadrature { measure: f64, moment: f64, order: usize, evaluations: u64 },
    /// Components: indicator, indicator × moment integrand.
    MonteCarlo(SampleStats),
}

/// The moment integrand as a function of the moduli.
#[inline]
pub(crate) fn moment_integrand(body: &Body, radii: &[f64]) -> f64 {
    match body {
        Body::Reinhardt(_) => radii.iter().map(|r| r * r).sum(),
        Body::Unconditional(_) => radii.iter().sum(),
    }
}

/// Evaluates measure and moment of `body` under `engine`. Monte Carlo passes
/// use stream `stream_index` of the engine's seed.
pub fn evaluate_body(body: &Body, engine: Engine, stream_index: u64) -> Result<BodyEvaluation> {
    let n = body.dim();
    match engine {
        Engine::Exact => {
            let (measure, moment) = body
                .exact_measure_and_moment()
                .ok_or_else(|| Error::NoClosedForm(body.to_string()))?;
            Ok(BodyEvaluation::Exact { measure, moment })
        }
        Engine::Auto { samples, seed } => match body.exact_measure_and_moment() {
            Some((measure, moment)) => Ok(BodyEvaluation::Exact { measure, moment }),
            None => evaluate_body(body, Engine::MonteCarlo { samples, seed }, stream_index),
        },
        Engine::Quadrature { order } => {
            let indicator = |r: &[f64]| if radial_member(body, r) { 1.0 } else { 0.0 };
            let weighted = |r: &[f64]| {
                if radial_member(body, r) {
                    moment_integrand(body, r)
                } else {
                    0.0
                }
            };
            let (m, s) = match body {
                Body::Reinhardt(_) => (
                    tensor_quadrature(indicator, n, order)?,
                    tensor_quadrature(weighted, n, order)?,
                ),
                Body::Unconditional(_) => (
                    tensor_quadrature_exponential(indicator, n, order)?,
                    tensor_quadrature_exponential(weighted, n, order)?,
                ),
            };
            Ok(BodyEvaluation::Quadrature {
                measure: m.value,
                moment: s.value,
                order,
                evaluations: m.samples,
            })
        }
        Engine::MonteCarlo { samples, seed } => {
            let stats = monte_carlo(body.natural_measure(), SampleView::Radial, samples, seed, stream_index, 2, |r, out| {
                if radial_member(body, r) {
                    out[0] = 1.0;
                    out[1] = moment_integrand(body, r);
                } else {
                    out[0] = 0.0;
                    out[1] = 0.0;
                }
            })?;
            Ok(BodyEvaluation::MonteCarlo(stats))
        }
    }
}

impl BodyEvaluation {
    pub fn measure(&self) -> Estimate {
        match self {
            BodyEvaluation::Exact { measure, .. } => Estimate::exact(*measure),
            BodyEvaluation::Quadrature { measure, order, evaluations, .. } => {
                Estimate::quadrature(*measure, *order, *evaluations)
            }
            BodyEvaluation::MonteCarlo(stats) => stats.estimate(0),
        }
    }

    pub fn moment(&self) -> Estimate {
        match self {
            BodyEvaluation::Exact { moment, .. } => Estimate::exact(*moment),
            BodyEvaluation::Quadrature { moment, order, evaluations, .. } => {
                Estimate::quadrature(*moment, *order, *evaluations)
            }
            BodyEvaluation::MonteCarlo(stats) => stats.estimate(1),
        }
    }

    pub fn method(&self) -> Method {
        self.measure().method
    }

    /// Value and standard error of `F(measure, moment)` given the gradient
    /// `(∂F/∂measure, ∂F/∂moment)` at the estimate.
    pub fn combine(&self, value: f64, gradient: [f64; 2]) -> Estimate {
        match self {
            BodyEvaluation::MonteCarlo(stats) => {
                Estimate::monte_carlo(value, stats.std_error_of(&gradient), stats.count, stats.seed)
            }
            other => Estimate {
                value,
                ..other.measure()
            },
        }
    }
}

/// Measure of a body under `engine`.
pub fn estimate_measure(body: &Body, engine: Engine) -> Result<Estimate> {
    Ok(evaluate_body(body, engine, 0)?.measure())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{ReinhardtBody, UnconditionalBody};
    use std::f64::consts::LN_2;

    const HALF_RADIUS: f64 = 1.177_410_022_515_474_7;

    #[test]
    fn complex_gaussian_second_moment() {
        let measure = MeasureKind::ComplexGaussian { n: 2 };
        let stats = monte_carlo(measure, SampleView::Point, 1_000_000, 42, 0, 1, |z, out| {
            out[0] = z.iter().map(|v| v * v).sum();
        })
        .unwrap();
        let e = stats.estimate(0);
        assert!(e.covers(4.0, 3.0), "{e:?}");
    }

    #[test]
    fn complex_gaussian_cylinder_probability() {
        let measure = MeasureKind::ComplexGaussian { n: 1 };
        let stats = monte_carlo(measure, SampleView::Point, 1_000_000, 42, 0, 1, |z, out| {
            out[0] = if z[0].hypot(z[1]) <= HALF_RADIUS { 1.0 } else { 0.0 };
        })
        .unwrap();
        assert!(stats.estimate(0).covers(0.5, 3.0));
    }

    #[test]
    fn exponential_first_moment_and_strip() {
        let measure = MeasureKind::Exponential { n: 3 };
        let stats = monte_carlo(measure, SampleView::Point, 1_000_000, 42, 0, 2, |x, out| {
            out[0] = x.iter().map(|v| v.abs()).sum();
            out[1] = if x[0].abs() <= LN_2 { 1.0 } else { 0.0 };
        })
        .unwrap();
        assert!(stats.estimate(0).covers(3.0, 3.0));
        assert!(stats.estimate(1).covers(0.5, 3.0));
        // signs are balanced
        let signs = monte_carlo(measure, SampleView::Point, 200_000, 1, 0, 1, |x, out| out[0] = x[1].signum()).unwrap();
        assert!(signs.estimate(0).covers(0.0, 4.0));
    }

    #[test]
    fn samples_are_deterministic() {
        let s = SampleStream::new(9, 2).at(12345);
        assert_eq!(sample_complex_gaussian(3, s), sample_complex_gaussian(3, s));
        assert_eq!(sample_exponential(3, s), sample_exponential(3, s));
        assert_ne!(sample_exponential(3, s), sample_exponential(3, s.at(12346)));
    }

    #[test]
    fn radial_view_matches_point_view() {
        let measure = MeasureKind::ComplexGaussian { n: 2 };
        let s = SampleStream::new(5, 0).at(77);
        let point = sample_complex_gaussian(2, s);
        let mut radii = [0.0; 2];
        draw(measure, SampleView::Radial, &mut s.reader(4), &mut radii);
        assert!((radii[0] - point[0].hypot(point[1])).abs() < 1e-14);
        assert!((radii[1] - point[2].hypot(point[3])).abs() < 1e-14);
    }

    #[test]
    fn mc_measure_examples() {
        let measure = MeasureKind::ComplexGaussian { n: 2 };
        let cyl: Body = ReinhardtBody::cylinder(HALF_RADIUS, 2).unwrap().into();
        assert!(mc_measure(&cyl, measure, 1_000_000, 42).unwrap().covers(0.5, 3.0));
        let pd: Body = ReinhardtBody::polydisc(vec![1.5, 2.0]).unwrap().into();
        let expected = (1.0 - (-1.125f64).exp()) * (1.0 - (-2.0f64).exp());
        let e = mc_measure(&pd, measure, 1_000_000, 42).unwrap();
        assert!(e.covers(expected, 3.0), "{e:?} vs {expected}");
        let empty: Body = ReinhardtBody::empty(2).unwrap().into();
        assert_eq!(mc_measure(&empty, measure, 1000, 42).unwrap().value, 0.0);
        assert!(mc_measure(&pd, MeasureKind::ComplexGaussian { n: 3 }, 10, 1).is_err());
        assert!(mc_measure(&pd, measure, 0, 1).is_err());
        assert!(mc_measure(&pd, MeasureKind::Exponential { n: 2 }, 10, 1).is_err());
    }

    #[test]
    fn mc_integral_examples() {
        let c: Body = ReinhardtBody::cylinder(HALF_RADIUS, 1).unwrap().into();
        let sq = |z: &[f64]| z.iter().map(|v| v * v).sum::<f64>();
        let e = mc_integral(sq, Some(&c), MeasureKind::ComplexGaussian { n: 1 }, 1_000_000, 42).unwrap();
        assert!(e.covers(1.0 - LN_2, 3.0), "{e:?}");
        let e = mc_integral(sq, None, MeasureKind::ComplexGaussian { n: 3 }, 1_000_000, 42).unwrap();
        assert!(e.covers(6.0, 3.0), "{e:?}");
        let strip: Body = UnconditionalBody::strip(1.0, 2).unwrap().into();
        let l1 = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
        let e = mc_integral(l1, Some(&strip), MeasureKind::Exponential { n: 2 }, 1_000_000, 42).unwrap();
        assert!(e.covers(0.896_361_676_5, 3.0), "{e:?}");
    }

    #[test]
    fn mc_integral_aborts_on_non_finite() {
        let err = mc_integral(|z: &[f64]| 1.0 / (z[0] - z[0]), None, MeasureKind::ComplexGaussian { n: 1 }, 10, 1)
            .unwrap_err();
        assert!(err.is_numerical());
    }

    #[test]
    fn tensor_quadrature_examples() {
        assert!((tensor_quadrature(|_| 1.0, 3, 8).unwrap().value - 1.0).abs() < 1e-13);
        let e = tensor_quadrature(|r| r[0] * r[0], 2, 8).unwrap();
        assert!((e.value - 2.0).abs() < 1e-12);
        assert_eq!(e.std_error, 0.0);
        assert!(tensor_quadrature(|_| 1.0, 5, 8).is_err());
        assert!(tensor_quadrature(|_| 1.0, 2, 1).is_err());
    }

    #[test]
    fn tensor_quadrature_exact_for_polynomials_in_u() {
        // E[u₁^a u₂^b] = a! b! for u = r²/2 under μ.
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        for order in [4usize, 10] {
            for a in 0..order as u32 {
                for b in 0..(order as u32).min(4) {
                    let e = tensor_quadrature(
                        |r| (r[0] * r[0] / 2.0).powi(a as i32) * (r[1] * r[1] / 2.0).powi(b as i32),
                        2,
                        order,
                    )
                    .unwrap();
                    let exact = fact(a) * fact(b);
                    assert!(((e.value - exact) / exact).abs() < 1e-10, "order {order} a {a} b {b}");
                }
            }
        }
    }

    #[test]
    fn tensor_quadrature_converges_on_smooth_integrands() {
        // E[e^{-r₁²/2 - r₂²}] = (1/2)(1/3)
        let exact = 1.0 / 6.0;
        let f = |r: &[f64]| (-r[0] * r[0] / 2.0 - r[1] * r[1]).exp();
        let mut last = f64::INFINITY;
        for order in [2usize, 3, 4, 6, 8, 12, 16] {
            let err = (tensor_quadrature(f, 2, order).unwrap().value - exact).abs();
            assert!(err < last, "order {order}");
            last = err;
        }
        assert!(last < 1e-8);
    }

    #[test]
    fn tensor_quadrature_on_polydisc_indicator() {
        // The indicator jumps inside a node cell; the error is bounded by the
        // weights of the nodes adjacent to the jump, not by 1e-3.
        let pd = ReinhardtBody::polydisc(vec![1.0, 1.0]).unwrap();
        let exact = (1.0 - (-0.5f64).exp()).powi(2);
        let e = tensor_quadrature(|r| if pd.shadow_member(r) { 1.0 } else { 0.0 }, 2, 64).unwrap();
        let rule = gauss_laguerre(64);
        let cut = rule.nodes.iter().position(|&u| u > 0.5).unwrap();
        let jump_weight = rule.weights[cut - 1].max(rule.weights[cut]);
        let bound = 2.0 * jump_weight;
        assert!((e.value - exact).abs() <= bound, "{} vs {exact}, bound {bound}", e.value);
        assert!((e.value - exact).abs() < 5e-2);
    }

    #[test]
    fn evaluation_engines_agree() {
        let pd: Body = ReinhardtBody::polydisc(vec![1.5, 2.0]).unwrap().into();
        let exact = evaluate_body(&pd, Engine::Exact, 0).unwrap();
        let mc = evaluate_body(&pd, Engine::MonteCarlo { samples: 400_000, seed: 3 }, 0).unwrap();
        assert!(mc.measure().covers(exact.measure().value, 4.0));
        assert!(mc.moment().covers(exact.moment().value, 4.0));
        let lp: Body = ReinhardtBody::weighted_lp(1.0, vec![1.0, 2.0], 1.0).unwrap().into();
        assert!(matches!(evaluate_body(&lp, Engine::Exact, 0), Err(Error::NoClosedForm(_))));
        assert!(matches!(
            evaluate_body(&lp, Engine::Auto { samples: 1000, seed: 1 }, 0).unwrap(),
            BodyEvaluation::MonteCarlo(_)
        ));
    }
}
