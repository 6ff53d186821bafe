//! Random constructor families used by sweeps.
//!
//! Parameter ranges keep the measure of the generated body away from 0 and
//! 1, where the comparison sets degenerate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{radial_moment, Body, ReinhardtBody, UnconditionalBody};
use crate::error::{Error, Result};
use crate::rng::{SampleStream, StreamReader};
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Polydiscs in ℂⁿ.
    Polydisc,
    /// Weighted ℓp balls in ℂⁿ, `p ∈ [0.5, 4]`.
    ReinhardtLp,
    /// Alternating polydiscs and weighted ℓp balls.
    Reinhardt,
    /// Cubes in ℝⁿ.
    Cube,
    /// Boxes (intersections of coordinate strips) in ℝⁿ.
    Box,
    /// Weighted ℓp balls in ℝⁿ, `p ∈ [1, 4]`.
    UnconditionalLp,
    /// ℓ1 balls in ℝⁿ.
    Cross,
    /// Cubes, boxes, ℓp balls and ℓ1 balls in turn.
    Unconditional,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Polydisc,
        Family::ReinhardtLp,
        Family::Reinhardt,
        Family::Cube,
        Family::Box,
        Family::UnconditionalLp,
        Family::Cross,
        Family::Unconditional,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Polydisc => "polydisc",
            Family::ReinhardtLp => "reinhardt-lp",
            Family::Reinhardt => "reinhardt",
            Family::Cube => "cube",
            Family::Box => "box",
            Family::UnconditionalLp => "unconditional-lp",
            Family::Cross => "cross",
            Family::Unconditional => "unconditional",
        }
    }

    pub fn is_reinhardt(self) -> bool {
        matches!(self, Family::Polydisc | Family::ReinhardtLp | Family::Reinhardt)
    }

    /// The `index`-th body of this family in dimension `n` under `seed`.
    pub fn sample(self, n: usize, seed: u64, index: u64) -> Result<Body> {
        if n == 0 {
            return Err(Error::param("n", "dimension must be at least 1"));
        }
        // Sixteen words per coordinate is more than any constructor draws.
        let mut reader = SampleStream::new(seed, 0xB0D1E5).at(index).reader(16 * n as u64 + 4);
        let body: Body = match self {
            Family::Polydisc => random_polydisc(n, &mut reader)?.into(),
            Family::ReinhardtLp => random_reinhardt_lp(n, &mut reader)?.into(),
            Family::Reinhardt => {
                if index % 2 == 0 {
                    random_polydisc(n, &mut reader)?.into()
                } else {
                    random_reinhardt_lp(n, &mut reader)?.into()
                }
            }
            Family::Cube => random_cube(n, &mut reader)?.into(),
            Family::Box => random_box(n, &mut reader)?.into(),
            Family::UnconditionalLp => random_unconditional_lp(n, &mut reader)?.into(),
            Family::Cross => random_cross(n, &mut reader)?.into(),
            Family::Unconditional => match index % 4 {
                0 => random_cube(n, &mut reader)?.into(),
                1 => random_box(n, &mut reader)?.into(),
                2 => random_unconditional_lp(n, &mut reader)?.into(),
                _ => random_cross(n, &mut reader)?.into(),
            },
        };
        Ok(body)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::param("family", format!("unknown family `{s}`")))
    }
}

fn uniform(reader: &mut StreamReader, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * reader.next_open01()
}

pub fn random_polydisc(n: usize, reader: &mut StreamReader) -> Result<ReinhardtBody> {
    let radii = (0..n).map(|_| uniform(reader, 0.3, 3.0)).collect();
    ReinhardtBody::polydisc(radii)
}

pub fn random_reinhardt_lp(n: usize, reader: &mut StreamReader) -> Result<ReinhardtBody> {
    let p = uniform(reader, 0.5, 4.0);
    let weights: Vec<f64> = (0..n).map(|_| uniform(reader, 0.5, 2.0)).collect();
    // Σ w_k r_k^p has mean (Σ w) E r^p under the radial measure.
    let typical = weights.iter().sum::<f64>() * radial_moment(p);
    let scale = (typical * uniform(reader, 0.3, 1.5)).powf(1.0 / p);
    ReinhardtBody::weighted_lp(p, weights, scale)
}

pub fn random_cube(n: usize, reader: &mut StreamReader) -> Result<UnconditionalBody> {
    UnconditionalBody::cube(uniform(reader, 0.2, 2.5), n)
}

pub fn random_box(n: usize, reader: &mut StreamReader) -> Result<UnconditionalBody> {
    let mut widths: Vec<f64> = (0..n)
        .map(|_| {
            let a = uniform(reader, 0.2, 3.0);
            if reader.next_open01() < 0.25 {
                f64::INFINITY
            } else {
                a
            }
        })
        .collect();
    if widths.iter().all(|a| a.is_infinite()) {
        widths[0] = uniform(reader, 0.2, 3.0);
    }
    UnconditionalBody::boxed(widths)
}

pub fn random_unconditional_lp(n: usize, reader: &mut StreamReader) -> Result<UnconditionalBody> {
    let p = uniform(reader, 1.0, 4.0);
    let weights: Vec<f64> = (0..n).map(|_| uniform(reader, 0.5, 2.0)).collect();
    // E|x|^p = Γ(p + 1) under λ.
    let typical = weights.iter().sum::<f64>() * gamma(p + 1.0);
    let scale = (typical * uniform(reader, 0.3, 1.5)).powf(1.0 / p);
    UnconditionalBody::weighted_lp(p, weights, scale)
}

pub fn random_cross(n: usize, reader: &mut StreamReader) -> Result<UnconditionalBody> {
    UnconditionalBody::cross_polytope(uniform(reader, 0.3, 1.5) * n as f64, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_deterministic_and_valid() {
        for family in Family::ALL {
            for n in 1..=4 {
                for i in 0..20 {
                    let a = family.sample(n, 7, i).unwrap();
                    let b = family.sample(n, 7, i).unwrap();
                    assert_eq!(a.to_string(), b.to_string());
                    assert_eq!(a.dim(), n);
                    assert!(a.is_validated());
                    assert_eq!(family.is_reinhardt(), matches!(a, Body::Reinhardt(_)));
                }
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for family in Family::ALL {
            assert_eq!(family.name().parse::<Family>().unwrap(), family);
        }
        assert!("nope".parse::<Family>().is_err());
    }
}
