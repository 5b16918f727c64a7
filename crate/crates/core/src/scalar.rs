//! Floating-point abstraction shared by every algorithm in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Coordinate type for data points and centroids.
///
/// Per-point squared distances are computed in `Self`; aggregate objective
/// values (SSE, per-centroid error and utility) are accumulated in `f64`.
pub trait Scalar:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion into the accumulation type.
    fn to_acc(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Conversion from `f64`; values out of range become infinite.
    fn from_acc(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::infinity)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
