//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// The tolerances quoted throughout the crate assume `f64`; `f32` builds are
/// supported for small spins and quick experiments.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + LinalgScalar
    + ScalarOperand
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + NumAssign
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + LinalgScalar
        + ScalarOperand
        + Debug
        + Display
        + LowerExp
        + Default
        + Sum
        + NumAssign
        + Send
        + Sync
        + 'static
{
}

/// `ln C(n, k)` via log-gamma.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    libm::lgamma(f64::from(n) + 1.0)
        - libm::lgamma(f64::from(k) + 1.0)
        - libm::lgamma(f64::from(n - k) + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_binomial_small_and_large() {
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-12);
        assert!(ln_binomial(7, 0).abs() < 1e-12);
        // C(1000, 500) overflows f64 but its log does not.
        let v = ln_binomial(1000, 500);
        assert!(v.is_finite() && v > 680.0 && v < 700.0);
    }
}
