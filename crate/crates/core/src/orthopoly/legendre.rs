//! Legendre polynomials, their derivatives, associated and shifted variants.

use super::jacobi::jacobi_in;
use crate::error::{Error, Result};
use crate::numerics::{factorial_ratio, Real, ScaledReal};

const RESCALE: i32 = 600;

/// `P_n(y)` by `(k+1)P_{k+1} = (2k+1)yP_k − kP_{k−1}`.
pub fn legendre_in<T: Real>(n: u32, y: T) -> ScaledReal<T> {
    if n == 0 {
        return ScaledReal::ONE;
    }
    if y < -T::ONE {
        let v = legendre_in(n, -y);
        return if n % 2 == 1 { -v } else { v };
    }
    let mut prev = T::ONE;
    let mut cur = y;
    let mut shift = 0i64;
    for k in 1..n as i64 {
        let next = (T::from_i64(2 * k + 1) * y * cur - T::from_i64(k) * prev) / T::from_i64(k + 1);
        prev = cur;
        cur = next;
        let e = cur.exponent().max(prev.exponent());
        if e > RESCALE {
            cur = cur.ldexp(-RESCALE);
            prev = prev.ldexp(-RESCALE);
            shift += RESCALE as i64;
        }
    }
    ScaledReal::from_parts(cur, shift)
}

/// `d^m P_n / dy^m = (n+m)!/(2^m n!) · P_{n−m}^{(m,m)}(y)`; zero for `m > n`.
pub fn legendre_deriv_in<T: Real>(n: u32, m: u32, y: T) -> ScaledReal<T> {
    if m == 0 {
        return legendre_in(n, y);
    }
    if m > n {
        return ScaledReal::ZERO;
    }
    let pre = factorial_ratio::<T>((n + m) as u64, n as u64).ldexp(-(m as i64));
    pre * jacobi_in(n - m, m as i64, m as i64, y)
}

pub fn legendre(n: u32, y: f64) -> ScaledReal {
    legendre_in(n, y)
}

pub fn legendre_deriv(n: u32, m: u32, y: f64) -> ScaledReal {
    legendre_deriv_in(n, m, y)
}

/// `P_n(2z − 1)`.
pub fn shifted_legendre(n: u32, z: f64) -> ScaledReal {
    legendre(n, 2.0 * z - 1.0)
}

/// Associated Legendre function `P_n^m(y) = (−1)^m (1−y²)^{m/2} d^m P_n/dy^m`
/// on `[−1, 1]`; negative orders through
/// `P_n^{−m} = (−1)^m (n−m)!/(n+m)! · P_n^m`.
pub fn assoc_legendre(n: u32, m: i64, y: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("associated Legendre needs |y| <= 1, got {y}")));
    }
    let k = m.unsigned_abs();
    if k > n as u64 {
        return Err(Error::InvalidInput(format!("order {m} exceeds degree {n}")));
    }
    let k = k as u32;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let positive = sign * (1.0 - y * y).powf(k as f64 / 2.0) * legendre_deriv(n, k, y).to_f64();
    if m >= 0 {
        Ok(positive)
    } else {
        let ratio = factorial_ratio::<f64>((n + k) as u64, (n - k) as u64).recip().to_f64();
        Ok(sign * ratio * positive)
    }
}
