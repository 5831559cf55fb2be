//! Gaussian density and distribution function.
//!
//! `erfc` comes from `libm` (the msun rational approximations, about one ulp
//! in `f64`) and is evaluated in `f64` for every [`Real`]. Every risk formula
//! in the crate is a composition of [`normal_cdf`] and [`normal_pdf`], so
//! their accuracy bounds everything downstream.

use crate::real::Real;

/// Complementary error function.
pub fn erfc<T: Real>(x: T) -> T {
    T::lit(libm::erfc(x.as_f64()))
}

/// Error function.
pub fn erf<T: Real>(x: T) -> T {
    T::lit(libm::erf(x.as_f64()))
}

/// Standard normal density φ(x).
#[inline]
pub fn normal_pdf<T: Real>(x: T) -> T {
    (-(x * x) / T::lit(2.0)).exp() / (T::TAU()).sqrt()
}

/// Standard normal distribution function Φ(x), accurate in relative terms
/// deep into the lower tail.
#[inline]
pub fn normal_cdf<T: Real>(x: T) -> T {
    T::lit(0.5) * erfc(-x / T::SQRT_2())
}
