//! Sharp comparison of moments of unconditional norms under `λ_n`.
//!
//! For every norm whose unit ball is an unconditional convex body and
//! `p ≥ q > 0`,
//!
//! ```text
//! (∫ ‖x‖^p dλ_n)^{1/p} ≤ C_{p,q} (∫ ‖x‖^q dλ_n)^{1/q},
//! C_{p,q} = Γ(p+1)^{1/p} / Γ(q+1)^{1/q},
//! ```
//!
//! with equality for the coordinate functional `|x₁|`.

use serde::Serialize;

use crate::bodies::{UnconditionalBody, UnconditionalShape};
use crate::error::{Error, Result};
use crate::integrate::{
    monte_carlo, sample_exponential, tensor_quadrature_exponential, Engine, Estimate, Method, SampleView,
};
use crate::measures::{abs_moment_exponential, MeasureKind};
use crate::rng::SampleStream;
use crate::verify::{is_stochastic, reruns, tolerance_for, Verdict};

/// Largest admissible exponent. The tail variance of `‖x‖^p` grows like
/// `Γ(2p+1)/Γ(p+1)²`, which makes Monte Carlo useless well before this.
pub const MAX_EXPONENT: f64 = 30.0;
/// Points used by the sign-flip and homogeneity checks on the norm.
pub const NORM_CHECK_SAMPLES: u64 = 1000;
const NORM_CHECK_SEED: u64 = 0x5CA1E;
const NORM_CHECK_RELATIVE: f64 = 1e-9;
const MOMENT_STREAM: u64 = 11;

fn check_exponents(p: f64, q: f64) -> Result<()> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(v > 0.0 && v <= MAX_EXPONENT) {
            return Err(Error::param(name, format!("{v} must lie in (0, {MAX_EXPONENT}]")));
        }
    }
    if p < q {
        return Err(Error::param("p", format!("p = {p} must be at least q = {q}")));
    }
    Ok(())
}

/// `C_{p,q} = Γ(p+1)^{1/p} / Γ(q+1)^{1/q}`.
pub fn cpq(p: f64, q: f64) -> Result<f64> {
    check_exponents(p, q)?;
    if p == q {
        return Ok(1.0);
    }
    let lp = abs_moment_exponential(p)?.ln() / p;
    let lq = abs_moment_exponential(q)?.ln() / q;
    Ok((lp - lq).exp())
}

/// Named norms: `linf`, `l1`, `coord` (the functional `|x₁|`), `lp:p=..`,
/// or any unconditional body descriptor taken as the unit ball.
pub fn parse_norm(descriptor: &str, n: usize) -> Result<UnconditionalBody> {
    let d = descriptor.trim();
    let body = match d {
        "linf" => UnconditionalBody::cube(1.0, n)?,
        "l1" => UnconditionalBody::cross_polytope(1.0, n)?,
        "coord" => UnconditionalBody::strip(1.0, n)?,
        _ => {
            if let Some(rest) = d.strip_prefix("lp:p=") {
                let p: f64 = rest
                    .parse()
                    .map_err(|_| Error::descriptor(d, "expected lp:p=<exponent>"))?;
                UnconditionalBody::weighted_lp(p, vec![1.0; n], 1.0)?
            } else {
                UnconditionalBody::parse(d)?
            }
        }
    };
    if body.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: body.dim() });
    }
    Ok(body)
}

/// Outcome of the sampled checks on a norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormCheck {
    pub points: u64,
    pub sign_flip_violation: Option<Vec<f64>>,
    pub homogeneity_violation: Option<(Vec<f64>, f64)>,
}

impl NormCheck {
    pub fn passed(&self) -> bool {
        self.sign_flip_violation.is_none() && self.homogeneity_violation.is_none()
    }
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= NORM_CHECK_RELATIVE * a.abs().max(b.abs())
}

/// Checks `‖εx‖ = ‖x‖` for random sign patterns `ε` and `‖cx‖ = c‖x‖` for
/// random `c ∈ [0.1, 10]` at points drawn from `λ_n`.
pub fn check_norm(norm: &UnconditionalBody, points: u64, seed: u64) -> NormCheck {
    let n = norm.dim();
    let mut report = NormCheck {
        points,
        sign_flip_violation: None,
        homogeneity_violation: None,
    };
    for i in 0..points {
        let x = sample_exponential(n, SampleStream::new(seed, 0).at(i));
        let mut reader = SampleStream::new(seed, 1).at(i).reader(2);
        let signs = reader.next_u64();
        let c = 10f64.powf(2.0 * reader.next_open01() - 1.0);
        let g = norm.gauge(&x);
        let flipped: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(k, v)| if (signs >> (k % 64)) & 1 == 1 { -v } else { *v })
            .collect();
        if !close(norm.gauge(&flipped), g) {
            report.sign_flip_violation = Some(x);
            return report;
        }
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        if !close(norm.gauge(&scaled), c * g) {
            report.homogeneity_violation = Some((x, c));
            return report;
        }
    }
    report
}

/// `s` with `‖x‖ = s|x₁|`, when the norm only looks at one coordinate.
fn single_coordinate_scale(norm: &UnconditionalBody) -> Option<f64> {
    match norm.shape() {
        UnconditionalShape::Strip { half_width, .. } => Some(1.0 / half_width),
        UnconditionalShape::Custom(_) => None,
        _ if norm.dim() == 1 => Some(norm.gauge(&[1.0])),
        _ => None,
    }
}

/// Moments of one norm and their ratio against `C_{p,q}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentPair {
    pub norm: String,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub moment_p: Estimate,
    pub moment_q: Estimate,
    /// `(∫‖x‖^p)^{1/p} / (∫‖x‖^q)^{1/q}`.
    pub ratio: f64,
    pub ratio_std_error: f64,
    pub bound: f64,
    /// `bound - ratio`; nonnegative when the inequality holds.
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub method: Method,
    pub certification_seeds: Vec<u64>,
}

impl MomentPair {
    pub fn holds(&self) -> bool {
        self.margin >= -self.tolerance
    }
}

fn ratio_once(norm: &UnconditionalBody, p: f64, q: f64, engine: Engine) -> Result<MomentPair> {
    let n = norm.dim();
    let bound = cpq(p, q)?;
    let closed = match engine {
        Engine::Exact | Engine::Auto { .. } => single_coordinate_scale(norm),
        _ => None,
    };
    let (moment_p, moment_q, ratio, ratio_std_error) = match (engine, closed) {
        (_, Some(s)) => {
            let a = abs_moment_exponential(p)? * s.powf(p);
            let b = abs_moment_exponential(q)? * s.powf(q);
            let r = a.powf(1.0 / p) / b.powf(1.0 / q);
            (Estimate::exact(a), Estimate::exact(b), r, 0.0)
        }
        (Engine::Exact, None) => {
            return Err(Error::NoClosedForm(format!("moments of the norm with unit ball {norm}")));
        }
        (Engine::Quadrature { order }, None) => {
            let a = tensor_quadrature_exponential(|x| norm.gauge(x).powf(p), n, order)?;
            let b = tensor_quadrature_exponential(|x| norm.gauge(x).powf(q), n, order)?;
            let r = a.value.powf(1.0 / p) / b.value.powf(1.0 / q);
            (a, b, r, 0.0)
        }
        (Engine::MonteCarlo { samples, seed } | Engine::Auto { samples, seed }, None) => {
            let measure = MeasureKind::Exponential { n };
            let stats = monte_carlo(measure, SampleView::Point, samples, seed, MOMENT_STREAM, 2, |x, out| {
                let g = norm.gauge(x);
                out[0] = g.powf(p);
                out[1] = g.powf(q);
            })?;
            let (a, b) = (stats.mean(0), stats.mean(1));
            let r = a.powf(1.0 / p) / b.powf(1.0 / q);
            let se = stats.std_error_of(&[r / (p * a), -r / (q * b)]);
            (stats.estimate(0), stats.estimate(1), r, se)
        }
    };
    if !(moment_p.value > 0.0 && moment_q.value > 0.0) || !ratio.is_finite() {
        return Err(Error::HypothesisViolated(format!(
            "the norm with unit ball {norm} has vanishing or infinite moments"
        )));
    }
    let method = moment_p.method;
    let margin = bound - ratio;
    let tolerance = tolerance_for(method, ratio_std_error);
    let verdict = if margin >= -tolerance { Verdict::Holds } else { Verdict::Violated };
    Ok(MomentPair {
        norm: norm.to_string(),
        n,
        p,
        q,
        moment_p,
        moment_q,
        ratio,
        ratio_std_error,
        bound,
        margin,
        tolerance,
        verdict,
        method,
        certification_seeds: Vec::new(),
    })
}

/// Estimates both moments on one sample stream and compares their ratio
/// with `C_{p,q}`. A Monte Carlo violation is kept only if it survives
/// reruns with fresh seeds and doubled samples.
pub fn moment_ratio(norm: &UnconditionalBody, p: f64, q: f64, n: usize, engine: Engine) -> Result<MomentPair> {
    check_exponents(p, q)?;
    if norm.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: norm.dim() });
    }
    let check = check_norm(norm, NORM_CHECK_SAMPLES, NORM_CHECK_SEED);
    if let Some(x) = &check.sign_flip_violation {
        return Err(Error::HypothesisViolated(format!("{norm} is not invariant under sign flips at {x:?}")));
    }
    if let Some((x, c)) = &check.homogeneity_violation {
        return Err(Error::HypothesisViolated(format!("{norm} is not homogeneous at {x:?} with scale {c}")));
    }
    let mut pair = ratio_once(norm, p, q, engine)?;
    if pair.verdict == Verdict::Violated && is_stochastic(engine, pair.method) {
        for rerun in reruns(engine) {
            let again = ratio_once(norm, p, q, rerun)?;
            if let Method::MonteCarlo { seed, .. } = again.method {
                pair.certification_seeds.push(seed);
            }
            if again.verdict != Verdict::Violated {
                pair.verdict = Verdict::Inconclusive;
            }
        }
    }
    Ok(pair)
}
