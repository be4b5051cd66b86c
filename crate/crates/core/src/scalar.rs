//! Scalar abstraction so the whole pipeline runs in either f32 or f64.

use std::fmt::{Debug, Display};

use num_traits::Float;

/// Floating point scalar used throughout the crate.
///
/// `Float` brings `NumCast`, so any `Real` converts to and from f64; the
/// extra bounds let values appear in errors, reports, and parallel loops.
pub trait Real: Float + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from f64, for constants and configuration values.
    fn from_f64(v: f64) -> Self {
        num_traits::cast(v).expect("f64 constant representable in scalar type")
    }

    /// Widening conversion to f64, for persistence and reporting.
    fn to_f64(self) -> f64 {
        num_traits::cast(self).expect("scalar representable as f64")
    }
}

impl<T> Real for T where T: Float + Debug + Display + Send + Sync + 'static {}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip<F: Real>(v: f64) -> f64 {
        F::from_f64(v).to_f64()
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        assert_eq!(roundtrip::<f64>(0.123456789012345), 0.123456789012345);
    }

    #[test]
    fn f32_roundtrip_loses_precision_but_stays_close() {
        let v = roundtrip::<f32>(0.123456789012345);
        assert!((v - 0.123456789012345).abs() < 1e-7);
    }
}
