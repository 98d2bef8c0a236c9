//! Checks of the Legendre derivative identities. Each returns the worst
//! discrepancy found so that tests and the validation suite share one
//! implementation.

use num_bigint::BigInt;

use super::exact::exact_rodrigues_derivative;
use super::legendre::{assoc_legendre, legendre_deriv};
use crate::error::Result;
use crate::numerics::{factorial, factorial_ratio};

/// `(n−m+1) D^{n+m+1}(x²−1)^{n+1} = x D^{n+m+2}(x²−1)^{n+1} − 2(n+1) D^{n+m+1}(x²−1)^n`
/// as exact polynomials. Returns the `(n, m)` pairs that fail.
pub fn rodrigues_recurrence_failures(max_n: u32) -> Result<Vec<(u32, i64)>> {
    let mut failures = Vec::new();
    for n in 0..=max_n {
        for m in -(n as i64 + 1)..=n as i64 {
            let d = (n as i64 + m + 1) as u32;
            let lhs = exact_rodrigues_derivative(n + 1, d)?.scale(&BigInt::from(n as i64 - m + 1));
            let rhs = exact_rodrigues_derivative(n + 1, d + 1)?
                .mul_x()
                .sub(&exact_rodrigues_derivative(n, d)?.scale(&BigInt::from(2 * (n as i64 + 1))));
            if lhs != rhs {
                failures.push((n, m));
            }
        }
    }
    Ok(failures)
}

/// Relative discrepancy in `(n−m+1) d^m P_{n+1} = y d^{m+1}P_{n+1} − d^{m+1}P_n`,
/// measured against the largest term so that roots of either side do not
/// blow up the ratio.
pub fn derivative_recurrence_error(n: u32, m: u32, y: f64) -> f64 {
    let lhs = (n as f64 - m as f64 + 1.0) * legendre_deriv(n + 1, m, y).to_f64();
    let t1 = y * legendre_deriv(n + 1, m + 1, y).to_f64();
    let t2 = legendre_deriv(n, m + 1, y).to_f64();
    let scale = lhs.abs().max(t1.abs()).max(t2.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - (t1 - t2)).abs() / scale
    }
}

/// `D^{n+m}(x²−1)^n / (2^n n!) = (n+m)!/(n−m)! (1−y²)^{−m/2} P_n^{−m}(y)` for
/// `−n ≤ m ≤ n`, `|y| < 1`. The left side is evaluated exactly; returns the
/// relative discrepancy (absolute when the exact side vanishes).
pub fn rodrigues_associated_error(n: u32, m: i64, y: f64) -> Result<f64> {
    let d = (n as i64 + m) as u32;
    let exact = exact_rodrigues_derivative(n, d)?.halve(n).eval_exact(y).to_scaled();
    let lhs = (exact / factorial::<f64>(n as u64)).to_f64();
    let ratio = if m >= 0 {
        factorial_ratio::<f64>((n as i64 + m) as u64, (n as i64 - m) as u64).to_f64()
    } else {
        factorial_ratio::<f64>((n as i64 - m) as u64, (n as i64 + m) as u64).recip().to_f64()
    };
    let rhs = ratio * (1.0 - y * y).powf(-(m as f64) / 2.0) * assoc_legendre(n, -m, y)?;
    Ok(if lhs == 0.0 { rhs.abs() } else { ((lhs - rhs) / lhs).abs() })
}
