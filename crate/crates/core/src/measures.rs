//! Closed-form measures, moments and distribution functions for the
//! standard complex Gaussian measure on ℂⁿ, its radial factor on ℝ₊, and
//! the symmetric exponential measures on ℝ and ℝⁿ.
//!
//! Notation used throughout the crate:
//! * complex Gaussian `ν_n`: image of the standard Gaussian on ℝ²ⁿ under
//!   `(Re z₁, Im z₁, …, Re z_n, Im z_n) ↦ z`; each `|z_k|²` has mean 2.
//! * radial measure `μ`: law of `|z₁|` under `ν₁`, density `r e^{-r²/2}`.
//! * exponential `λ`: density `e^{-|x|}/2` on ℝ, and `λ_n = λ^{⊗n}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma, xlogx};

/// The reference measures handled by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureKind {
    /// Standard complex Gaussian on ℂⁿ.
    ComplexGaussian { n: usize },
    /// Product symmetric exponential on ℝⁿ.
    Exponential { n: usize },
    /// Radial factor on ℝ₊ with density `r e^{-r²/2}`.
    RadialMu,
    /// Unit-rate exponential on ℝ₊ (the law of `|x|` under `λ`).
    Exponential1d,
}

impl MeasureKind {
    pub fn complex_gaussian(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(MeasureKind::ComplexGaussian { n })
    }

    pub fn exponential(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(MeasureKind::Exponential { n })
    }

    /// Dimension of the underlying space (complex dimension for `ν_n`).
    pub fn dim(&self) -> usize {
        match *self {
            MeasureKind::ComplexGaussian { n } | MeasureKind::Exponential { n } => n,
            MeasureKind::RadialMu | MeasureKind::Exponential1d => 1,
        }
    }

    /// Number of real coordinates in a sample point.
    pub fn real_dim(&self) -> usize {
        match *self {
            MeasureKind::ComplexGaussian { n } => 2 * n,
            MeasureKind::Exponential { n } => n,
            MeasureKind::RadialMu | MeasureKind::Exponential1d => 1,
        }
    }
}

impl std::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureKind::ComplexGaussian { n } => write!(f, "complex-gaussian(n={n})"),
            MeasureKind::Exponential { n } => write!(f, "exponential(n={n})"),
            MeasureKind::RadialMu => f.write_str("radial-mu"),
            MeasureKind::Exponential1d => f.write_str("exponential-1d"),
        }
    }
}

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::param("probability", format!("{value} is outside [0, 1]")))
        }
    }

    /// Clamps tiny excursions caused by rounding.
    pub(crate) fn clamped(value: f64) -> Self {
        Probability(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - p`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("n", "dimension must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_nonneg(name: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{x} must be non-negative")))
    }
}

/// `ν_n({|z₁| ≤ R}) = 1 - e^{-R²/2}`; independent of `n`.
pub fn cylinder_measure(radius: f64, n: usize) -> Result<Probability> {
    check_nonneg("R", radius)?;
    check_dim(n)?;
    Ok(Probability::clamped(-(-radius * radius / 2.0).exp_m1()))
}

/// `∫_C |z|² dν_n` for the cylinder of radius `R`.
///
/// Equals `2(1-m) ln(1-m) + 2n m` with `m = ν_n(C)`; evaluated through the
/// tail `s = 1 - m = e^{-R²/2}` so that `s ln s = -s R²/2` stays accurate
/// for large radii.
pub fn cylinder_second_moment(radius: f64, n: usize) -> Result<f64> {
    let m = cylinder_measure(radius, n)?.value();
    let s = (-radius * radius / 2.0).exp();
    let s_ln_s = if s == 0.0 { 0.0 } else { -s * radius * radius / 2.0 };
    Ok(2.0 * s_ln_s + 2.0 * n as f64 * m)
}

/// The right-hand side of the cylinder moment identity in terms of the
/// measure: `2n m + 2(1-m) ln(1-m)`.
pub fn cylinder_second_moment_from_measure(m: Probability, n: usize) -> f64 {
    2.0 * n as f64 * m.value() + 2.0 * xlogx(m.complement())
}

/// CDF of the radial measure `μ`: `1 - e^{-r²/2}`.
pub fn radial_cdf(r: f64) -> Result<Probability> {
    check_nonneg("r", r)?;
    Ok(Probability::clamped(-(-r * r / 2.0).exp_m1()))
}

/// Tail `μ((r, ∞)) = e^{-r²/2}`.
pub fn radial_tail(r: f64) -> f64 {
    if r <= 0.0 {
        1.0
    } else {
        (-r * r / 2.0).exp()
    }
}

/// Quantile of `μ`: `√(-2 ln(1-u))`.
pub fn radial_cdf_inverse(u: Probability) -> Result<f64> {
    if u.value() >= 1.0 {
        return Err(Error::param("u", "quantile at 1 is infinite"));
    }
    Ok((-2.0 * (-u.value()).ln_1p()).sqrt())
}

/// `λ_n({|x₁| ≤ p}) = 1 - e^{-p}`.
pub fn exp_strip_measure(half_width: f64) -> Result<Probability> {
    check_nonneg("p", half_width)?;
    Ok(Probability::clamped(-(-half_width).exp_m1()))
}

/// `∫_P |x|₁ dλ_n = n(1 - e^{-p}) - p e^{-p}` for the strip of half-width `p`.
pub fn exp_strip_first_moment(half_width: f64, n: usize) -> Result<f64> {
    let m = exp_strip_measure(half_width)?.value();
    check_dim(n)?;
    let tail = if half_width.is_infinite() {
        0.0
    } else {
        half_width * (-half_width).exp()
    };
    Ok(n as f64 * m - tail)
}

/// The strip first moment in terms of the measure:
/// `n m + (1-m) ln(1-m)`.
pub fn exp_strip_first_moment_from_measure(m: Probability, n: usize) -> f64 {
    n as f64 * m.value() + xlogx(m.complement())
}

/// `∫ |x|^p dλ = Γ(p + 1)` for `p > 0`.
pub fn abs_moment_exponential(p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::param("p", format!("{p} must be a positive finite exponent")));
    }
    Ok(gamma(p + 1.0))
}

/// `ν₁({|z| ≤ R})`-restricted second moment `∫_{|z|≤R} |z|² dν₁ = 2 - 2e^{-u}(1+u)`
/// with `u = R²/2`.
pub(crate) fn disc_second_moment(radius: f64) -> f64 {
    let u = radius * radius / 2.0;
    if u.is_infinite() {
        return 2.0;
    }
    // 1 - e^{-u}(1+u), accurate for small u through expm1.
    let core = -(-u).exp_m1() - u * (-u).exp();
    2.0 * core
}

/// `∫_{-a}^{a} |x| dλ(x) = 1 - e^{-a}(1+a)`.
pub(crate) fn interval_first_moment(a: f64) -> f64 {
    if a.is_infinite() {
        return 1.0;
    }
    -(-a).exp_m1() - a * (-a).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    const HALF_RADIUS: f64 = 1.177_410_022_515_474_7; // √(2 ln 2)

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = f(a) + f(b);
        for i in 1..panels {
            let x = a + i as f64 * h;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        acc * h / 3.0
    }

    #[test]
    fn cylinder_measure_examples() {
        assert_eq!(cylinder_measure(0.0, 3).unwrap().value(), 0.0);
        assert_eq!(cylinder_measure(f64::INFINITY, 1).unwrap().value(), 1.0);
        assert!((cylinder_measure(HALF_RADIUS, 2).unwrap().value() - 0.5).abs() < 1e-15);
        assert!(cylinder_measure(-1.0, 1).is_err());
        assert!(cylinder_measure(1.0, 0).is_err());
    }

    #[test]
    fn cylinder_measure_is_dimension_free_and_increasing() {
        let mut last = -1.0;
        // beyond r ≈ 8.5 the measure rounds to 1 in binary64
        for i in 0..170 {
            let r = i as f64 * 0.05;
            let m = cylinder_measure(r, 1).unwrap().value();
            for n in 2..6 {
                assert_eq!(cylinder_measure(r, n).unwrap().value(), m);
            }
            assert!(m > last);
            last = m;
        }
    }

    #[test]
    fn cylinder_second_moment_examples() {
        assert_eq!(cylinder_second_moment(0.0, 5).unwrap(), 0.0);
        let v = cylinder_second_moment(HALF_RADIUS, 1).unwrap();
        assert!((v - (1.0 - LN_2)).abs() < 1e-14, "{v}");
        assert_eq!(cylinder_second_moment(f64::INFINITY, 2).unwrap(), 4.0);
    }

    #[test]
    fn cylinder_second_moment_matches_radial_quadrature_in_one_dimension() {
        for &r in &[0.2, 0.7, HALF_RADIUS, 1.9, 3.0, 4.5] {
            let quad = simpson(|x| x.powi(3) * (-x * x / 2.0).exp(), 0.0, r, 2000);
            let m = cylinder_measure(r, 1).unwrap();
            let from_m = 2.0 * m.value() + 2.0 * xlogx(m.complement());
            assert!((cylinder_second_moment(r, 1).unwrap() - quad).abs() < 1e-10);
            assert!((from_m - quad).abs() < 1e-10);
            assert!((disc_second_moment(r) - quad).abs() < 1e-10);
        }
    }

    #[test]
    fn cylinder_second_moment_splits_over_coordinates() {
        // Free coordinates each contribute E|z_k|² = 2 over the cylinder.
        for &r in &[0.3, 1.0, 2.2] {
            let m = cylinder_measure(r, 1).unwrap().value();
            for n in 1..5 {
                let expected = disc_second_moment(r) + 2.0 * (n as f64 - 1.0) * m;
                assert!((cylinder_second_moment(r, n).unwrap() - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn radial_cdf_examples() {
        assert_eq!(radial_cdf(0.0).unwrap().value(), 0.0);
        let half = radial_cdf_inverse(Probability::new(0.5).unwrap()).unwrap();
        assert!((half - HALF_RADIUS).abs() < 1e-15);
        let q = radial_cdf_inverse(Probability::new(0.9).unwrap()).unwrap();
        assert!((radial_cdf(q).unwrap().value() - 0.9).abs() < 1e-15);
        assert!(radial_cdf_inverse(Probability::ONE).is_err());
    }

    #[test]
    fn radial_round_trip_on_grid() {
        // In binary64 the CDF value carries the tail only to absolute 1e-16,
        // so recovering r itself to 1e-12 is possible while e^{-r²/2} r stays
        // above ~1e-4; beyond that the round trip is checked in CDF space.
        for i in 0..=800 {
            let r = i as f64 * 0.01;
            let u = radial_cdf(r).unwrap();
            if u.value() == 1.0 {
                continue;
            }
            let back = radial_cdf_inverse(u).unwrap();
            if r <= 3.5 {
                assert!((back - r).abs() < 1e-12, "r={r} back={back}");
            }
            assert!((radial_cdf(back).unwrap().value() - u.value()).abs() < 1e-12);
        }
    }

    #[test]
    fn strip_examples() {
        assert_eq!(exp_strip_measure(0.0).unwrap().value(), 0.0);
        assert!((exp_strip_measure(LN_2).unwrap().value() - 0.5).abs() < 1e-15);
        assert_eq!(exp_strip_measure(f64::INFINITY).unwrap().value(), 1.0);

        assert_eq!(exp_strip_first_moment(0.0, 4).unwrap(), 0.0);
        let v = exp_strip_first_moment(1.0, 2).unwrap();
        assert!((v - (2.0 - 3.0 / E)).abs() < 1e-15);
        assert!((v - 0.896_361_676_5).abs() < 1e-10);
        assert_eq!(exp_strip_first_moment(f64::INFINITY, 3).unwrap(), 3.0);
    }

    #[test]
    fn strip_moment_dimension_increment_is_measure() {
        for &p in &[0.0, 0.1, 0.5, 1.0, 3.0, 10.0] {
            let m = exp_strip_measure(p).unwrap().value();
            for n in 1..6 {
                let diff = exp_strip_first_moment(p, n).unwrap() - exp_strip_first_moment(p, 1).unwrap();
                assert!((diff - (n as f64 - 1.0) * m).abs() < 1e-14);
            }
            let from_m = exp_strip_first_moment_from_measure(Probability::new(m).unwrap(), 3);
            assert!((from_m - exp_strip_first_moment(p, 3).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn interval_moment_matches_quadrature() {
        for &a in &[0.1, 1.0, 2.5] {
            let quad = simpson(|x| x * (-x).exp(), 0.0, a, 2000);
            assert!((interval_first_moment(a) - quad).abs() < 1e-12);
        }
    }

    #[test]
    fn abs_moments() {
        assert!((abs_moment_exponential(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((abs_moment_exponential(2.0).unwrap() - 2.0).abs() < 1e-15);
        for &p in &[0.5, 1.7, 3.3] {
            let quad = simpson(|x| x.powf(p) * (-x).exp(), 0.0, 60.0, 200_000);
            let got = abs_moment_exponential(p).unwrap();
            // x^0.5 has an endpoint singularity; Simpson converges slowly there.
            assert!(((got - quad) / quad).abs() < 1e-6, "p={p}: {got} vs {quad}");
        }
        assert!((abs_moment_exponential(0.5).unwrap() - 0.886_226_925_452_758).abs() < 1e-14);
        assert!(abs_moment_exponential(0.0).is_err());
        assert!(abs_moment_exponential(-1.0).is_err());
    }
}
