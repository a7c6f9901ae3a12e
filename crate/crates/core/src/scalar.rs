use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Num;

/// Exact field of coefficients.
///
/// Every computation in this crate is exact, so only field types with exact
/// equality implement this trait. There is deliberately no implementation for
/// floating point types.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialEq + Debug + Display + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl Scalar for Rational64 {
    fn from_i64(v: i64) -> Self {
        Rational64::from_integer(v)
    }
}
