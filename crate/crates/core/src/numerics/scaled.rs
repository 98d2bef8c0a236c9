//! Extended-exponent reals: a mantissa in `[1,2)` times an `i64` power of two.
//!
//! Legendre values at arguments like `(1+ξ)/(1−ξ)` with ξ near 1, and powers
//! such as `(1−ξ)^{n²}`, leave the `f64` exponent range long before they
//! become numerically meaningless. Carrying the exponent separately keeps
//! every intermediate finite.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::real::{DoubleDouble, Real};
use crate::error::{Error, Result};

/// `mantissa · 2^exponent` with `|mantissa| ∈ [1,2)`, or the canonical zero.
#[derive(Clone, Copy, PartialEq)]
pub struct ScaledReal<T: Real = f64> {
    mantissa: T,
    exponent: i64,
}

/// Exponent gap beyond which the smaller addend cannot affect the sum.
fn negligible_gap<T: Real>() -> i64 {
    if T::EPSILON < 1e-20 {
        110
    } else {
        60
    }
}

impl<T: Real> ScaledReal<T> {
    pub const ZERO: Self = Self { mantissa: T::ZERO, exponent: 0 };
    pub const ONE: Self = Self { mantissa: T::ONE, exponent: 0 };

    /// Builds and renormalizes `m · 2^e`. Panics on a non-finite mantissa;
    /// use [`normalize`] for the checked public entry point.
    pub fn from_parts(m: T, e: i64) -> Self {
        debug_assert!(m.is_finite(), "non-finite mantissa {m:?}");
        if m.is_zero() {
            return Self::ZERO;
        }
        let shift = m.exponent();
        Self { mantissa: m.ldexp(-shift), exponent: e + shift as i64 }
    }

    pub fn from_real(m: T) -> Self {
        Self::from_parts(m, 0)
    }

    pub fn from_f64(x: f64) -> Self {
        Self::from_real(T::from_f64(x))
    }

    pub fn from_i64(x: i64) -> Self {
        Self::from_real(T::from_i64(x))
    }

    pub fn mantissa(self) -> T {
        self.mantissa
    }

    pub fn exponent(self) -> i64 {
        self.exponent
    }

    pub fn is_zero(self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(self) -> bool {
        self.mantissa < T::ZERO
    }

    pub fn abs(self) -> Self {
        Self { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Multiplies by `2^k` exactly.
    pub fn ldexp(self, k: i64) -> Self {
        if self.is_zero() {
            self
        } else {
            Self { mantissa: self.mantissa, exponent: self.exponent + k }
        }
    }

    /// Value in the backing type; saturates to ±inf / 0 outside its range.
    pub fn to_real(self) -> T {
        if self.is_zero() {
            return T::ZERO;
        }
        let e = self.exponent.clamp(-1200, 1200) as i32;
        self.mantissa.ldexp(e)
    }

    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let e = self.exponent.clamp(-1200, 1200) as i32;
        super::real::f64_ldexp(self.mantissa.to_f64(), e)
    }

    /// Natural logarithm of the magnitude; `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.abs().to_f64().ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn powi(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn convert<U: Real>(self) -> ScaledReal<U> {
        ScaledReal::from_parts(U::from_dd(self.mantissa.to_dd()), self.exponent)
    }
}

impl ScaledReal<DoubleDouble> {
    pub fn from_dd(x: DoubleDouble) -> Self {
        Self::from_real(x)
    }
}

/// Checked constructor: renormalizes `mantissa · 2^exponent`.
pub fn normalize(mantissa: f64, exponent: i64) -> Result<ScaledReal> {
    if !mantissa.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite mantissa {mantissa}")));
    }
    Ok(ScaledReal::from_parts(mantissa, exponent))
}

/// `base^exp` by square-and-multiply, for `base ∈ (0,1]`.
pub fn pow_scaled(base: f64, exp: u64) -> Result<ScaledReal> {
    pow_scaled_in::<f64>(base, exp)
}

/// Generic form of [`pow_scaled`]; the base is converted exactly into `T`.
pub fn pow_scaled_in<T: Real>(base: T, exp: u64) -> Result<ScaledReal<T>> {
    if !(base > T::ZERO && base <= T::ONE) {
        return Err(Error::InvalidInput(format!("pow_scaled base {base:?} outside (0,1]")));
    }
    Ok(ScaledReal::from_real(base).powi(exp))
}

impl<T: Real> Default for ScaledReal<T> {
    fn default() -> Self {
        Self::ZERO
    }
}

impl<T: Real> From<f64> for ScaledReal<T> {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl<T: Real> fmt::Debug for ScaledReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}·2^{}", self.mantissa, self.exponent)
    }
}

impl<T: Real> fmt::Display for ScaledReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if v.is_finite() && (v == 0.0 || v.abs() > 1e-300) {
            write!(f, "{v:e}")
        } else {
            // print as m·10^k without overflowing
            let log10 = self.ln_abs() / std::f64::consts::LN_10;
            let k = log10.floor();
            let m = 10f64.powf(log10 - k) * self.mantissa.signum_f64();
            write!(f, "{m}e{k}")
        }
    }
}

impl<T: Real> Neg for ScaledReal<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

impl<T: Real> Mul for ScaledReal<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::from_parts(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl<T: Real> Div for ScaledReal<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "ScaledReal division by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::from_parts(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl<T: Real> Add for ScaledReal<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent { (self, rhs) } else { (rhs, self) };
        let gap = big.exponent - small.exponent;
        if gap > negligible_gap::<T>() {
            return big;
        }
        let m = big.mantissa + small.mantissa.ldexp(-(gap as i32));
        Self::from_parts(m, big.exponent)
    }
}

impl<T: Real> Sub for ScaledReal<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Mul<T> for ScaledReal<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self * Self::from_real(rhs)
    }
}

impl<T: Real> PartialOrd for ScaledReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = *self - *other;
        if d.is_zero() {
            Some(Ordering::Equal)
        } else if d.is_negative() {
            Some(Ordering::Less)
        } else {
            Some(Ordering::Greater)
        }
    }
}

impl<T: Real> std::iter::Sum for ScaledReal<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl<T: Real> std::iter::Product for ScaledReal<T> {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

/// Rising factorial `(a)_k = a(a+1)…(a+k−1)` as a running product.
pub fn pochhammer<T: Real>(a: i64, k: u64) -> ScaledReal<T> {
    (0..k as i64).map(|i| ScaledReal::from_i64(a + i)).product()
}

/// `n!`
pub fn factorial<T: Real>(n: u64) -> ScaledReal<T> {
    pochhammer(1, n)
}

/// `n!/m!` for `m ≤ n`, without forming either factorial.
pub fn factorial_ratio<T: Real>(n: u64, m: u64) -> ScaledReal<T> {
    assert!(m <= n);
    pochhammer(m as i64 + 1, n - m)
}
