//! Jacobi polynomials `P_n^{(a,b)}(y)` for integer parameters `a, b ≥ −n`.

use crate::numerics::{factorial, pochhammer, Real, ScaledReal};

/// Values are rescaled by `2^RESCALE` whenever they drift past it, so the
/// recurrence never leaves the native exponent range.
const RESCALE: i32 = 600;

/// Generalized binomial coefficient `C(r, k)` for integer `r` (possibly negative).
pub(crate) fn binomial<T: Real>(r: i64, k: u64) -> ScaledReal<T> {
    if r >= 0 && (k as i64) > r {
        return ScaledReal::ZERO;
    }
    // r(r−1)…(r−k+1)/k!
    let falling: ScaledReal<T> = (0..k as i64).map(|i| ScaledReal::from_i64(r - i)).product();
    falling / factorial(k)
}

/// `P_n^{(a,b)}(y)` evaluated in `T` arithmetic.
pub fn jacobi_in<T: Real>(n: u32, a: i64, b: i64, y: T) -> ScaledReal<T> {
    assert!(a >= -(n as i64) && b >= -(n as i64), "Jacobi parameters ({a},{b}) below -{n}");
    if n == 0 {
        return ScaledReal::ONE;
    }
    if y < -T::ONE {
        // P_n^{(a,b)}(−y) = (−1)^n P_n^{(b,a)}(y) keeps the recurrence in its growth regime
        let v = jacobi_in(n, b, a, -y);
        return if n % 2 == 1 { -v } else { v };
    }
    if b < 0 {
        let l = (-b) as u32;
        if l <= n {
            // C(n,l) P_n^{(a,−l)} = C(n+a,l) ((y+1)/2)^l P_{n−l}^{(a,l)}
            let half = ScaledReal::from_real((y + T::ONE).ldexp(-1));
            let coef = binomial::<T>(n as i64 + a, l as u64) / binomial(n as i64, l as u64);
            if coef.is_zero() {
                return ScaledReal::ZERO;
            }
            return coef * half.powi(l as u64) * jacobi_in(n - l, a, l as i64, y);
        }
    }
    if a < 0 {
        let l = (-a) as u32;
        if l <= n {
            let half = ScaledReal::from_real((y - T::ONE).ldexp(-1));
            let coef = binomial::<T>(n as i64 + b, l as u64) / binomial(n as i64, l as u64);
            if coef.is_zero() {
                return ScaledReal::ZERO;
            }
            return coef * half.powi(l as u64) * jacobi_in(n - l, l as i64, b, y);
        }
    }
    if a + b <= -2 {
        return jacobi_explicit(n, a, b, y);
    }
    jacobi_recurrence(n, a, b, y)
}

/// Standard three-term recurrence; valid whenever `a + b ≥ −1`.
fn jacobi_recurrence<T: Real>(n: u32, a: i64, b: i64, y: T) -> ScaledReal<T> {
    let two = T::from_f64(2.0);
    let mut prev = T::ONE;
    let mut cur = (T::from_i64(a - b) + T::from_i64(a + b + 2) * y) / two;
    let mut shift: i64 = 0;
    let ab = a + b;
    for k in 2..=n as i64 {
        let s = 2 * k + ab;
        let c1 = T::from_i64(2 * k * (k + ab) * (s - 2));
        let c2 = T::from_i64((s - 1) * (a * a - b * b));
        let c3 = T::from_i64((s - 2) * (s - 1) * s);
        let c4 = T::from_i64(2 * (k + a - 1) * (k + b - 1) * s);
        let next = ((c2 + c3 * y) * cur - c4 * prev) / c1;
        prev = cur;
        cur = next;
        let e = cur.exponent().max(prev.exponent());
        if e > RESCALE || (e < -RESCALE && !cur.is_zero()) {
            let by = if e > RESCALE { RESCALE } else { -RESCALE };
            cur = cur.ldexp(-by);
            prev = prev.ldexp(-by);
            shift += by as i64;
        }
    }
    ScaledReal::from_parts(cur, shift)
}

/// Direct sum `Σ_k C(n+a, n−k) C(n+b, k) ((y−1)/2)^k ((y+1)/2)^{n−k}`.
///
/// Exact polynomial identity for any integer parameters; used for the
/// degenerate parameter sets where the recurrence divides by zero, and as a
/// test oracle.
pub fn jacobi_explicit<T: Real>(n: u32, a: i64, b: i64, y: T) -> ScaledReal<T> {
    let minus = ScaledReal::from_real((y - T::ONE).ldexp(-1));
    let plus = ScaledReal::from_real((y + T::ONE).ldexp(-1));
    let n64 = n as i64;
    (0..=n as u64)
        .map(|k| {
            binomial::<T>(n64 + a, n as u64 - k)
                * binomial(n64 + b, k)
                * minus.powi(k)
                * plus.powi(n as u64 - k)
        })
        .sum()
}

/// `d^k/dy^k P_n^{(a,b)}(y) = (n+a+b+1)_k / 2^k · P_{n−k}^{(a+k,b+k)}(y)`.
pub fn jacobi_deriv_in<T: Real>(n: u32, a: i64, b: i64, k: u32, y: T) -> ScaledReal<T> {
    if k > n {
        return ScaledReal::ZERO;
    }
    if k == 0 {
        return jacobi_in(n, a, b, y);
    }
    let pre = pochhammer::<T>(n as i64 + a + b + 1, k as u64).ldexp(-(k as i64));
    if pre.is_zero() {
        return ScaledReal::ZERO;
    }
    pre * jacobi_in(n - k, a + k as i64, b + k as i64, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DoubleDouble;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        // P_1^{(a,b)} = ((a−b) + (a+b+2)y)/2
        assert_eq!(jacobi_in(1, 1, 2, 0.0f64).to_f64(), -0.5);
        assert_eq!(jacobi_in(1, 3, 0, 1.0f64).to_f64(), 4.0);
        assert_eq!(jacobi_in(0, 5, 7, 3.0f64).to_f64(), 1.0);
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        for n in 0..12u32 {
            for a in 0..5i64 {
                for b in 0..5i64 {
                    for &y in &[-3.5, -1.0, -0.3, 0.0, 0.7, 1.0, 2.5, 40.0] {
                        let r = jacobi_recurrence::<DoubleDouble>(n.max(1), a, b, DoubleDouble::from(y));
                        let e = jacobi_explicit::<DoubleDouble>(n.max(1), a, b, DoubleDouble::from(y));
                        let scale = e.abs().to_f64().max(1.0);
                        assert!(((r - e).to_f64() / scale).abs() < 1e-24, "n={n} a={a} b={b} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn negative_parameters_use_reflection_consistently() {
        // compare the reflected evaluation against the explicit polynomial sum
        for n in 1..10u32 {
            for a in 0..4i64 {
                for l in 1..=n as i64 {
                    for &y in &[-2.0, -0.5, 0.25, 1.0, 3.0, 17.0] {
                        let got = jacobi_in::<DoubleDouble>(n, a, -l, DoubleDouble::from(y)).to_f64();
                        let want = jacobi_explicit::<DoubleDouble>(n, a, -l, DoubleDouble::from(y)).to_f64();
                        assert!(rel(got, want) < 1e-13 || (got - want).abs() < 1e-13, "n={n} a={a} b=-{l} y={y}: {got} vs {want}");
                        let got = jacobi_in::<DoubleDouble>(n, -l, a, DoubleDouble::from(y)).to_f64();
                        let want = jacobi_explicit::<DoubleDouble>(n, -l, a, DoubleDouble::from(y)).to_f64();
                        assert!(rel(got, want) < 1e-13 || (got - want).abs() < 1e-13, "n={n} a=-{l} b={a} y={y}: {got} vs {want}");
                    }
                }
            }
        }
    }

    #[test]
    fn parity_swaps_parameters() {
        for n in 0..20u32 {
            let p = jacobi_in(n, 2, 5, 3.25f64).to_f64();
            let q = jacobi_in(n, 5, 2, -3.25f64).to_f64();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(rel(q, sign * p) < 1e-14);
        }
    }

    #[test]
    fn huge_arguments_do_not_overflow() {
        let v = jacobi_in(3000, 2, 3, 1e6f64);
        assert!(v.exponent() > 50_000);
        let w = jacobi_in::<DoubleDouble>(3000, 2, 3, DoubleDouble::from(1e6));
        assert!(((v - w.convert()) / v).to_f64().abs() < 1e-11);
    }

    #[test]
    fn derivative_connection_matches_finite_difference() {
        let (n, a, b, y) = (9u32, 1i64, 3i64, 1.3f64);
        let h = 1e-5;
        let fd = (jacobi_in(n, a, b, y + h).to_f64() - jacobi_in(n, a, b, y - h).to_f64()) / (2.0 * h);
        assert!(rel(jacobi_deriv_in(n, a, b, 1, y).to_f64(), fd) < 1e-8);
        assert_eq!(jacobi_deriv_in(3, 0, 0, 4, 0.3f64).to_f64(), 0.0);
    }
}
