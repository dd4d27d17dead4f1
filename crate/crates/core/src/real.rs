//! Scalar abstraction: everything real-valued in this crate is generic over
//! [`Real`], implemented for `f32` and `f64`.

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// `nalgebra::RealField` supplies the transcendental functions needed by the
/// spectral routines; the `num_traits` casts move values across the f64-based
/// file formats and RNG draws.
pub trait Real: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy + Default {
    /// Converts an `f64` constant, rounding to the nearest representable value.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to any Real")
    }

    /// Lossy conversion back to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
