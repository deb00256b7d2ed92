//! Floating-point scalar abstraction for the approximate parts of the crate.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar used by oracles and numerical condition tests: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from `f64`, used for tolerances and constants.
    fn of(x: f64) -> Self;
}

impl Real for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
}

impl Real for f64 {
    fn of(x: f64) -> Self {
        x
    }
}

/// `e^{2πi k / m}` for `k` already reduced into `[0, m)`.
pub fn cis_turns<T: Real>(k: u64, m: u64) -> Complex<T> {
    debug_assert!(m > 0);
    let k = k % m;
    let angle = T::TAU() * T::of(k as f64) / T::of(m as f64);
    Complex::new(angle.cos(), angle.sin())
}

/// The `m` powers of `ω_m`, indexed by exponent.
pub fn roots_table<T: Real>(m: u64) -> Vec<Complex<T>> {
    (0..m).map(|k| cis_turns(k, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turn_is_i() {
        let z: Complex<f64> = cis_turns(1, 4);
        assert!((z - Complex::new(0.0, 1.0)).norm() < 1e-15);
        let w: Complex<f32> = cis_turns(5, 4);
        assert!((w - Complex::new(0.0, 1.0)).norm() < 1e-6);
    }

    #[test]
    fn roots_sum_to_zero() {
        for m in 2..20 {
            let s: Complex<f64> = roots_table::<f64>(m).into_iter().sum();
            assert!(s.norm() < 1e-12, "m = {m}");
        }
    }
}
