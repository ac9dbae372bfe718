use std::fmt;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating scalar the core math is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Tolerance on unit sums (state norms, probability weights).
    ///
    /// The `f64` contract is 1e-12; wider types keep it, narrower ones
    /// fall back to a multiple of their machine epsilon.
    fn sum_tol() -> Self {
        let contract = real::<Self>(1e-12);
        let floor = Self::epsilon() * real::<Self>(64.0);
        if contract > floor {
            contract
        } else {
            floor
        }
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + fmt::Debug
        + fmt::Display
        + fmt::LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for lifting an `f64` literal into the working scalar.
pub(crate) fn real<R: Scalar>(x: f64) -> R {
    R::from_f64(x).expect("f64 literal must convert into the scalar type")
}
