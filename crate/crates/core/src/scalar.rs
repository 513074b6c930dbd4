//! Scalar field abstraction shared by the floating and exact-rational modes.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use rand::Rng;

/// Coefficient type of every double form.
///
/// Implemented for `f64` (floating mode) and [`BigRational`] (exact mode).
pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static {
    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64;

    /// A random coefficient in `[-1, 1]` for property suites.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// True for exact arithmetic, where identities must hold with zero deviation.
    const EXACT: bool;
}

impl Scalar for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random_range(-1.0..=1.0)
    }

    const EXACT: bool = false;
}

impl Scalar for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_i64(v).expect("i64 is representable")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        // small denominators keep products of several forms cheap
        let den: i64 = rng.random_range(1..=4);
        let num: i64 = rng.random_range(-den..=den);
        Self::from_ratio(num, den)
    }

    const EXACT: bool = true;
}

pub fn factorial<S: Scalar>(k: usize) -> S {
    (1..=k as i64).fold(S::one(), |acc, i| acc * S::from_int(i))
}

pub fn factorial_f64(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}
