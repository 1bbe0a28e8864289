//! Scalar abstraction for the closed-form layer.
//!
//! The special functions and the fixed quadrature rules are written against
//! this trait so they work for `f32` and `f64` alike; the solvers and
//! experiment drivers instantiate everything at [`crate::Scalar`] (`f64`).

use num_traits::{Float, FromPrimitive};

pub trait Real: Float + FromPrimitive + std::fmt::Debug + Copy + Send + Sync + 'static {
    /// Converts an `f64` constant, panicking only for non-representable NaN-free inputs.
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("scalar constant out of range")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + std::fmt::Debug + Copy + Send + Sync + 'static {}
