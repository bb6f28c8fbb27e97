//! Scalar abstraction shared by every numeric routine.
//!
//! Two backends are provided: plain `f64` and [`Mp`], an MPFR float whose
//! working precision is a thread-local setting (256 bits unless changed).

use std::cell::Cell;
use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

/// Multiple-precision float backend.
pub type Mp = Float;

/// Default MPFR precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

thread_local! {
    static PRECISION: Cell<u32> = const { Cell::new(DEFAULT_PRECISION) };
}

/// Working precision (bits) used when new [`Mp`] values are created on this thread.
pub fn precision() -> u32 {
    PRECISION.with(|p| p.get())
}

/// Set the working precision for [`Mp`] values created on this thread.
pub fn set_precision(bits: u32) {
    PRECISION.with(|p| p.set(bits.max(53)));
}

/// Run `f` with a temporary working precision.
pub fn with_precision<R>(bits: u32, f: impl FnOnce() -> R) -> R {
    let old = precision();
    set_precision(bits);
    let out = f();
    set_precision(old);
    out
}

pub trait Real:
    Clone
    + Debug
    + Display
    + PartialOrd
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    fn from_f64(x: f64) -> Self;
    /// Parse a decimal literal at full working precision.
    fn parse_decimal(s: &str) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn cbrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan(&self) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn pi() -> Self;
    fn is_finite(&self) -> bool;
    /// Relative rounding unit of the backend.
    fn unit_roundoff() -> f64;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_f64(p as f64) / Self::from_f64(q as f64)
    }
    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
    fn neg_infinity() -> Self {
        Self::from_f64(f64::NEG_INFINITY)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn cbrt(&self) -> Self {
        f64::cbrt(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn atan(&self) -> Self {
        f64::atan(*self)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn unit_roundoff() -> f64 {
        f64::EPSILON / 2.0
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
}

impl Real for Mp {
    fn from_f64(x: f64) -> Self {
        Float::with_val(precision(), x)
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        Float::parse(s).ok().map(|p| Float::with_val(precision(), p))
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
    fn abs(&self) -> Self {
        self.clone().abs()
    }
    fn sqrt(&self) -> Self {
        self.clone().sqrt()
    }
    fn cbrt(&self) -> Self {
        self.clone().cbrt()
    }
    fn ln(&self) -> Self {
        self.clone().ln()
    }
    fn exp(&self) -> Self {
        self.clone().exp()
    }
    fn sin(&self) -> Self {
        self.clone().sin()
    }
    fn cos(&self) -> Self {
        self.clone().cos()
    }
    fn atan(&self) -> Self {
        self.clone().atan()
    }
    fn powf(&self, e: &Self) -> Self {
        self.clone().pow(e)
    }
    fn powi(&self, n: i32) -> Self {
        self.clone().pow(n)
    }
    fn pi() -> Self {
        Float::with_val(precision(), Constant::Pi)
    }
    fn is_finite(&self) -> bool {
        Float::is_finite(self)
    }
    fn unit_roundoff() -> f64 {
        2f64.powi(-(precision() as i32))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Float::with_val(precision(), p) / Float::with_val(precision(), q)
    }
}

/// Format with 17 significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_tracks_precision() {
        let x = with_precision(128, || Mp::from_f64(1.0) / Mp::from_f64(3.0));
        assert_eq!(x.prec(), 128);
        assert!((x.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn decimal_literal_is_exact_beyond_f64() {
        let a = Mp::parse_decimal("0.1").unwrap();
        let b = Mp::from_f64(0.1);
        assert!((a.clone() - b).abs().to_f64() > 1e-19);
        let ten = Mp::from_f64(10.0);
        assert!((a * ten - Mp::one()).abs().to_f64() < 1e-70);
    }

    #[test]
    fn sci_has_seventeen_digits() {
        assert_eq!(sci(std::f64::consts::LN_2), "6.9314718055994529e-1");
    }
}
