//! The independent α-dimensional Jacobi-polynomial representation.

use super::backend::{Arith, Eval, Tail, UnitBase};
use crate::error::Result;
use crate::numerics::{factorial_ratio, pochhammer, ScaledMatrix, ScaledReal};
use crate::orthopoly::jacobi_in;

/// `∏_{k=1}^{α} (n+k−1)!(α−k)! / ((α+n−1)!(k−1)!)`
fn prefactor<T: Arith>(n: u32, alpha: u32) -> ScaledReal<T> {
    (1..=alpha as u64)
        .map(|k| {
            factorial_ratio::<T>(n as u64 + k - 1, k - 1)
                / factorial_ratio::<T>(alpha as u64 + n as u64 - 1, alpha as u64 - k)
        })
        .product()
}

fn binom<T: Arith>(r: u64, k: u64) -> ScaledReal<T> {
    factorial_ratio::<T>(r, r - k) / crate::numerics::factorial(k)
}

/// `1 − h_{α,β}(ξ)` with the α×α matrix
/// `G_ij = Σ_k C(α−j,k) (−1)^k (j−i+k+1)_{α−j−k} (n+α+β−i+1)_k s^{j−i+k} P_{n+i−k−1}^{(α+k−i, β+k−i+1)}(y)`,
/// `s = −ξ/(1−ξ)`, `y = (1+ξ)/(1−ξ)` (1-based `i`, `j`).
pub(crate) fn h_eval<T: Arith>(alpha: u32, beta: u32, n: u32, xi: f64) -> Result<Eval> {
    // note: no αβ term in this exponent
    let exponent = n as u64 * (n as u64 + alpha as u64 + beta as u64);
    let p = T::pow_unit(UnitBase::OneMinus(xi), exponent);
    if alpha == 0 {
        return Eval::from_tail(Tail::Survival(p), 1.0);
    }
    let x = T::from_f64(xi);
    let one_minus = T::ONE - x;
    let y = (T::ONE + x) / one_minus;
    let s = ScaledReal::from_real(-(x / one_minus));
    let (a, b, n64) = (alpha as i64, beta as i64, n as i64);

    // smallest |entry| / largest |term| over the entry sums
    let mut entry_conditioning = 1.0f64;
    let g = ScaledMatrix::from_fn(alpha as usize, alpha as usize, |i0, j0| {
        let (i, j) = (i0 as i64 + 1, j0 as i64 + 1);
        let mut sum = ScaledReal::<T>::ZERO;
        let mut largest = ScaledReal::<T>::ZERO;
        for k in 0..=(a - j) {
            let power = j - i + k;
            let degree = n64 + i - k - 1;
            // (j−i+k+1)_{α−j−k} vanishes for negative powers of s
            if power < 0 || degree < 0 {
                continue;
            }
            let mut term = binom::<T>((a - j) as u64, k as u64)
                * pochhammer::<T>(power + 1, (a - j - k) as u64)
                * pochhammer::<T>(n64 + a + b - i + 1, k as u64)
                * s.powi(power as u64)
                * jacobi_in(degree as u32, a + k - i, b + k - i + 1, y);
            if k % 2 == 1 {
                term = -term;
            }
            if term.abs() > largest {
                largest = term.abs();
            }
            sum = sum + term;
        }
        if !largest.is_zero() {
            let c = (sum.abs() / largest).to_f64();
            entry_conditioning = entry_conditioning.min(c);
        }
        sum
    });
    let d = g.det_with_conditioning()?;
    let survival = prefactor::<T>(n, alpha) * p * d.value;
    Eval::from_tail(Tail::Survival(survival), d.conditioning.min(entry_conditioning))
}
