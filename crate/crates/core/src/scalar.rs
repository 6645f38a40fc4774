// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt;

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real floating-point scalar the simulator is generic over (`f32` or `f64`).
///
/// `num_traits::Float` is intentionally not a supertrait: its method names
/// collide with [`RealField`], which supplies all the elementary functions.
pub trait Real:
    RealField + Copy + FloatConst + FromPrimitive + ToPrimitive + FftNum + fmt::Display + fmt::LowerExp
{
    /// Machine epsilon, widened to `f64`.
    const EPSILON: f64;
}

impl Real for f32 {
    const EPSILON: f64 = f32::EPSILON as f64;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Widens a scalar to `f64` for reporting.
#[inline]
pub fn wide<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A tolerance of `x`, floored at a few hundred ulps of `T` so that `f32`
/// instantiations of `f64`-calibrated checks remain meaningful.
#[inline]
pub fn tol<T: Real>(x: f64) -> T {
    lit(x.max(256.0 * T::EPSILON))
}

/// `e^{i theta}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn c_zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn c_real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Modulus of a complex number without going through `num_traits::Float`.
#[inline]
pub fn c_abs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// Lossy conversion of a complex scalar to `Complex<f64>`.
#[inline]
pub fn c_wide<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(wide(z.re), wide(z.im))
}

/// Conversion of a `Complex<f64>` into `Complex<T>`.
#[inline]
pub fn c_lit<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(lit(z.re), lit(z.im))
}
