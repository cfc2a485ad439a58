//! Floating-point shims that work with and without `std`.
//!
//! The crate is `no_std`, and the transcendental methods on `f64` live in
//! `std`, not `core`. With the `std` feature on (the default) these helpers
//! forward to the inherent methods; without it they route to `libm`.

#![allow(dead_code)]

#[cfg(feature = "std")]
macro_rules! forward {
    ($(fn $name:ident($($arg:ident),+) => $std_call:expr, $_libm:expr;)+) => {
        $(
            #[inline(always)]
            pub(crate) fn $name($($arg: f64),+) -> f64 {
                $std_call
            }
        )+
    };
}

#[cfg(not(feature = "std"))]
macro_rules! forward {
    ($(fn $name:ident($($arg:ident),+) => $_std:expr, $libm_call:expr;)+) => {
        $(
            #[inline(always)]
            pub(crate) fn $name($($arg: f64),+) -> f64 {
                $libm_call
            }
        )+
    };
}

forward! {
    fn abs(x) => x.abs(), libm::fabs(x);
    fn floor(x) => x.floor(), libm::floor(x);
    fn ceil(x) => x.ceil(), libm::ceil(x);
    fn sqrt(x) => x.sqrt(), libm::sqrt(x);
    fn ln(x) => x.ln(), libm::log(x);
    fn ln_1p(x) => x.ln_1p(), libm::log1p(x);
    fn exp(x) => x.exp(), libm::exp(x);
    fn sin(x) => x.sin(), libm::sin(x);
    fn cos(x) => x.cos(), libm::cos(x);
    fn powf(x, y) => x.powf(y), libm::pow(x, y);
    fn atan2(y, x) => y.atan2(x), libm::atan2(y, x);
}

/// Euclidean norm of `(x, y)` without the overflow guards of `hypot`; fine
/// for data-scale magnitudes.
#[inline(always)]
pub(crate) fn norm2(x: f64, y: f64) -> f64 {
    sqrt(x * x + y * y)
}
