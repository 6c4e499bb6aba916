//! Coefficient scalar abstraction for the polynomial layer.
//!
//! The ring machinery only assumes an ordered field of exact scalars with
//! the usual num-traits surface. `num::BigRational` is the alias used by the
//! rest of the crate; `Ratio<i128>` or similar also qualify for small
//! experiments. Floating-point types do not implement `Ord`/`Num` exactness
//! requirements and are rejected by construction.

use num::traits::{FromPrimitive, NumAssign, Signed};
use num::Num;
use std::fmt::{Debug, Display};
use std::hash::Hash;

pub trait Scalar:
    Num
    + NumAssign
    + Signed
    + Clone
    + Ord
    + Hash
    + Debug
    + Display
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("scalar from i64")
    }
}

impl<T> Scalar for T where
    T: Num
        + NumAssign
        + Signed
        + Clone
        + Ord
        + Hash
        + Debug
        + Display
        + FromPrimitive
        + Send
        + Sync
        + 'static
{
}
