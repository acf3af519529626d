//! Scalar abstraction shared by every numerical module.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Complex numbers over a [`Real`] scalar.
pub type Complex<T> = nalgebra::Complex<T>;

/// Real floating-point scalar used throughout the crate.
///
/// The physics runs in `f64` by default; `f32` is supported for cheap
/// scans where a few digits are enough.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Send + Sync + 'static
{
    /// Smallest positive increment such that `1 + eps != 1`.
    const EPSILON: Self;

    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self;

    /// Widens to `f64` for reporting.
    fn to_f64_lossy(self) -> f64;

    fn is_finite_value(self) -> bool;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            const EPSILON: Self = <$t>::EPSILON;

            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }

            #[inline]
            fn is_finite_value(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// `re + i·im`.
#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Unit phasor `exp(i·theta)`.
#[inline]
pub fn phasor<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).abs() / scale
    }
}
