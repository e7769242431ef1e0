//! Scalar abstraction.
//!
//! Every numerical routine in this crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. The default type aliases exported at the
//! crate root fix the scalar to `f64`; `f32` support exists mainly to keep
//! the algorithms honest about precision assumptions.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Open01, StandardNormal};

/// Floating-point scalar with the sampling hooks the generators need.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used to inject literal constants.
    fn from64(x: f64) -> Self;

    /// Widening conversion to `f64`, used when reporting results.
    fn to64(self) -> f64;

    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from the chi-squared distribution with `df` degrees of
    /// freedom (`df > 0`).
    fn chi_squared<R: Rng + ?Sized>(df: Self, rng: &mut R) -> Self;

    /// One draw from the open unit interval (0, 1).
    fn uniform_01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Natural log of the absolute value of the gamma function.
    fn ln_gamma(self) -> Self {
        crate::dists::lgamma(self)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn from64(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn to64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn chi_squared<R: Rng + ?Sized>(df: Self, rng: &mut R) -> Self {
                ChiSquared::new(df)
                    .expect("chi-squared degrees of freedom must be positive")
                    .sample(rng)
            }

            #[inline]
            fn uniform_01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
