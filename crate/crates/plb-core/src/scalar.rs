//! Scalar abstraction for the numeric core.
//!
//! Everything that does arithmetic (the protection evaluator, the simplex,
//! the surrogate network, the cutting-plane loop) is generic over [`Real`]
//! so it runs unchanged on `f32` or `f64`. The crate root exposes `f64`
//! aliases, which is what the CLI and the serialization layer use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar usable by the numeric core.
pub trait Real:
    Float + NumAssign + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lift an `f64` constant into the scalar type.
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("constant not representable in scalar type")
    }

    /// Lift a `usize` (counts, grid sizes) into the scalar type.
    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("count not representable in scalar type")
    }
}

impl<T> Real for T where
    T: Float + NumAssign + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
}
