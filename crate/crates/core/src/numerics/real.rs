//! Floating-point backends for the exact-distribution kernels.
//!
//! Everything that evaluates Legendre/Jacobi determinants is generic over
//! [`Real`], so the same code runs in plain `f64` or in [`DoubleDouble`]
//! (an unevaluated sum of two doubles, about 31 significant digits).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Arithmetic needed by the determinant and recurrence kernels.
pub trait Real:
    Copy
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    const ZERO: Self;
    const ONE: Self;
    /// Unit roundoff of the representation.
    const EPSILON: f64;

    fn from_f64(x: f64) -> Self;
    /// Exact for |x| < 2^53 in `f64` and for every `i64` in `DoubleDouble`.
    fn from_i64(x: i64) -> Self;
    fn from_dd(x: DoubleDouble) -> Self;
    fn to_f64(self) -> f64;
    fn to_dd(self) -> DoubleDouble;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
    fn sqrt(self) -> Self;
    /// Multiplies by `2^e`; exact unless the result leaves the normal range.
    fn ldexp(self, e: i32) -> Self;
    /// Binary exponent of the leading component: `floor(log2|x|)`, 0 for zero.
    fn exponent(self) -> i32;

    fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    fn signum_f64(self) -> f64 {
        let v = self.to_f64();
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    }
}

/// Binary exponent of a finite nonzero double, handling subnormals.
pub(crate) fn f64_exponent(x: f64) -> i32 {
    if x == 0.0 || !x.is_finite() {
        return 0;
    }
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i32;
    if raw == 0 {
        // subnormal: renormalize through an exact power-of-two lift
        return f64_exponent(x * f64::from_bits(((1023 + 64) as u64) << 52)) - 64;
    }
    raw - 1023
}

/// `x * 2^e` computed without intermediate overflow for |e| up to a few thousand.
pub(crate) fn f64_ldexp(mut x: f64, mut e: i32) -> f64 {
    const STEP: i32 = 1000;
    let up = f64::from_bits(((1023 + STEP) as u64) << 52);
    let down = f64::from_bits(((1023 - STEP) as u64) << 52);
    while e > STEP {
        x *= up;
        e -= STEP;
        if !x.is_finite() {
            return x;
        }
    }
    while e < -STEP {
        x *= down;
        e += STEP;
        if x == 0.0 {
            return x;
        }
    }
    if e >= -1022 {
        x * f64::from_bits(((1023 + e) as u64) << 52)
    } else {
        // two steps keep the final multiply from rounding twice in the normal range
        x * f64::from_bits(((1023 + e + 60) as u64) << 52) * f64::from_bits(((1023 - 60) as u64) << 52)
    }
}

impl Real for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const EPSILON: f64 = f64::EPSILON / 2.0;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn from_dd(x: DoubleDouble) -> Self {
        x.hi + x.lo
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn to_dd(self) -> DoubleDouble {
        DoubleDouble::from(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ldexp(self, e: i32) -> Self {
        f64_ldexp(self, e)
    }
    fn exponent(self) -> i32 {
        f64_exponent(self)
    }
}

/// Double-double number `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

// Error-free transformations (Knuth two-sum, Dekker product). No FMA is
// assumed so results are identical on every target.

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    if a.abs() > 6.696e299 {
        // avoid overflow in the splitter product
        let scaled = a * 3.725_290_298_461_914e-9; // 2^-28
        let t = SPLITTER * scaled;
        let hi = t - (t - scaled);
        let lo = scaled - hi;
        (hi * 268_435_456.0, lo * 268_435_456.0)
    } else {
        let t = SPLITTER * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

impl DoubleDouble {
    pub const fn new_unchecked(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    /// Renormalizes an arbitrary pair into canonical form.
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `e^self` to about 2^−100 relative for |self| ≲ 700. Argument
    /// reduction by ln 2 and 2^4, Taylor series, then repeated squaring.
    pub fn exp(self) -> Self {
        const LN2: DoubleDouble = DoubleDouble::new_unchecked(std::f64::consts::LN_2, 2.3190468138462996e-17);
        if self.hi == 0.0 {
            return Self::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Self::from(k)).ldexp(-4);
        let mut term = Self::ONE;
        let mut sum = Self::ONE;
        for i in 1..=20 {
            term = term * r / Self::from(i as f64);
            sum += term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        for _ in 0..4 {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&(self.hi + self.lo), f)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        // long division with three partial quotients
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Self::from(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Self::from(q2);
        let q3 = r.hi / rhs.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::from(q3)
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Real for DoubleDouble {
    const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    const EPSILON: f64 = 4.930_380_657_631_324e-32; // 2^-104

    fn from_f64(x: f64) -> Self {
        Self::from(x)
    }
    fn from_i64(x: i64) -> Self {
        let hi = x as f64;
        // the remainder is exact because |x - hi| < 2^11 for any i64
        let lo = (x - hi as i64) as f64;
        Self::from_parts(hi, lo)
    }
    fn from_dd(x: DoubleDouble) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn to_dd(self) -> DoubleDouble {
        self
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from(self.hi.sqrt());
        }
        // one Newton step from the double approximation doubles the digits
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let residual = (self - Self::from_parts(p, e)).hi;
        Self::from_parts(x, residual / (2.0 * x))
    }
    fn ldexp(self, e: i32) -> Self {
        Self { hi: f64_ldexp(self.hi, e), lo: f64_ldexp(self.lo, e) }
    }
    fn exponent(self) -> i32 {
        f64_exponent(self.hi)
    }
}
