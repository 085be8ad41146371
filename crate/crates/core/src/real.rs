//! Real scalar abstraction: every numeric kernel in this crate is generic
//! over the floating-point type through this trait.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

/// Floating-point scalar: `f32` or `f64`.
///
/// Bundles the num-traits capabilities the kernels need, plus the two random
/// draws the simulator uses (so call sites only ever carry an `F: Real`
/// bound rather than rand distribution bounds).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// One sample from the standard normal distribution N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One sample uniform on [0, 1).
    fn uniform_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossy cast from `f64`, for configuration constants.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }
}

impl Real for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
    fn uniform_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardUniform.sample(rng)
    }
}

impl Real for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
    fn uniform_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardUniform.sample(rng)
    }
}
