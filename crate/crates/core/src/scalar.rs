//! Scalar abstractions.
//!
//! The discrete calculus only needs field operations, so it is written
//! against [`Arith`] and runs unchanged on `f32`, `f64` and exact rationals
//! (`num_rational::Ratio`, `BigRational`). Anything that needs square roots,
//! exponentials or an eigensolver asks for [`Real`] instead.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num, NumAssign, ToPrimitive};

/// Exact-or-approximate field arithmetic.
pub trait Arith: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + FromPrimitive {}

impl<T> Arith for T where T: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + FromPrimitive {}

/// Floating-point scalar used by the spectral, PDE and statistics layers.
pub trait Real:
    Arith + Float + NumAssign + Sum + ToPrimitive + Display + Send + Sync + Copy + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Small integer constant in any [`Arith`] type.
#[inline]
pub fn int<T: Arith>(n: i64) -> T {
    T::from_i64(n).expect("small integer is representable")
}

/// `base^exp` by repeated squaring; exact for rational types.
pub fn powi<T: Arith>(base: T, mut exp: u32) -> T {
    let mut acc = T::one();
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

/// `f64 -> T` for constants and tolerances.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite constant")
}

#[inline]
pub fn abs<T: Arith>(x: &T) -> T {
    if *x < T::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(powi(5i64, 0), 1);
        assert_eq!(powi(5i64, 7), 78_125);
        assert_eq!(powi(Ratio::new(5i64, 3), 3), Ratio::new(125, 27));
        assert!((powi(1.5f64, 10) - 1.5f64.powi(10)).abs() < 1e-12);
    }
}
