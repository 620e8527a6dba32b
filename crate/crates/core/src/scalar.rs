//! Floating point abstraction shared by every algorithm in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Real scalar used for payoffs, strategies and step sizes.
///
/// Implemented for `f32` and `f64`. Tolerances scale with the precision of
/// the type, so `f32` games use looser feasibility checks than `f64` games.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Absolute tolerance for membership in the reduced simplex.
    const FEASIBILITY_TOL: f64;
    /// Per-coordinate tolerance of the equality tests in the shrink/terminate step.
    const TERMINATION_TOL: f64;

    /// Converts an `f64` constant into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    fn feasibility_tol() -> Self {
        Self::lit(Self::FEASIBILITY_TOL)
    }

    fn termination_tol() -> Self {
        Self::lit(Self::TERMINATION_TOL)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const FEASIBILITY_TOL: f64 = 1e-12;
    const TERMINATION_TOL: f64 = 1e-12;
}

impl Scalar for f32 {
    const FEASIBILITY_TOL: f64 = 1e-6;
    const TERMINATION_TOL: f64 = 1e-6;
}

/// Sequential sum, the single summation order used for feasibility decisions.
pub(crate) fn seq_sum<T: Scalar>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, &x| acc + x)
}

pub(crate) fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc.max((x - y).abs()))
}

pub(crate) fn norm2<T: Scalar>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}
