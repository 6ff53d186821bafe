//! Numerical verification of the complex S-inequality for complete Reinhardt
//! sets under the standard complex Gaussian measure, and of its exponential
//! counterpart for unconditional convex bodies.
//!
//! The crate is layered bottom-up: closed forms ([`measures`]), body
//! representations ([`bodies`]), integration engines ([`integrate`]),
//! entropy inequalities ([`entropy`]), end-to-end criteria ([`verify`]) and
//! sharp moment comparison ([`moments`]).

pub mod bodies;
pub mod entropy;
pub mod error;
pub mod integrate;
pub mod measures;
pub mod moments;
pub mod rng;
pub mod serde_ext;
pub mod special;
pub mod verify;

pub use bodies::families::Family;
pub use bodies::{Body, ReinhardtBody, UnconditionalBody};
pub use error::{Error, Result};
pub use integrate::{Engine, Estimate, Method};
pub use measures::{MeasureKind, Probability};
pub use rng::SampleStream;
