//! Scalar abstraction shared by the pooler, agent and environments.
//!
//! Permanences, rewards and duty cycles are stored as `T: Real`, so the same
//! code runs in single or double precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for the finite constants used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in a float")
    }

    /// Draws from `[0, 1)`.
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draws from `N(mean, std_dev^2)`.
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mean: Self, std_dev: Self) -> Self;
}

impl Real for f32 {
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f32>()
    }

    fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mean: Self, std_dev: Self) -> Self {
        let z: f32 = StandardNormal.sample(rng);
        mean + std_dev * z
    }
}

impl Real for f64 {
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f64>()
    }

    fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mean: Self, std_dev: Self) -> Self {
        let z: f64 = StandardNormal.sample(rng);
        mean + std_dev * z
    }
}
