//! Scalar abstraction: every numerical kernel in this crate is generic over a
//! floating-point type implementing [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: f32 or f64.
pub trait Real: Float + FromPrimitive + Default + Debug + Display + Send + Sync + 'static {
    /// Cast an f64 literal into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Lossy conversion back to f64 (for reports and serialization).
    fn f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    fn pi() -> Self {
        Self::of(std::f64::consts::PI)
    }

    fn two_pi() -> Self {
        Self::of(std::f64::consts::TAU)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn casts_round_trip() {
        assert_eq!(f32::of(0.5), 0.5f32);
        assert_eq!(f64::of(0.5).f64(), 0.5);
        assert!((f32::pi().f64() - std::f64::consts::PI).abs() < 1e-6);
    }
}
