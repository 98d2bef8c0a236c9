//! Legendre-determinant representation of the smallest-eigenvalue CDF and
//! its one-sided simplifications.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use super::backend::{Arith, Eval, Tail, UnitBase};
use crate::error::Result;
use crate::numerics::{factorial, pochhammer, Determinant, DoubleDouble, ScaledMatrix, ScaledReal};
use crate::orthopoly::legendre_deriv_in;

/// Where the E-block is evaluated. `±1` use exact Pochhammer forms.
#[derive(Clone, Copy, Debug)]
pub(crate) enum EPoint<T> {
    One,
    MinusOne,
    At(T),
}

/// `d^j P_{n+i}(1) = 2^{−j} (n+i−j+1)_{2j} / j!` (0-based `i`, `j`).
fn entry_at_one<T: Arith>(n: u32, i: usize, j: usize) -> ScaledReal<T> {
    let a = n as i64 + i as i64 - j as i64 + 1;
    (pochhammer::<T>(a, 2 * j as u64) / factorial(j as u64)).ldexp(-(j as i64))
}

/// `rows × gamma` block with entries `d^j P_{n+i}(y)`.
pub(crate) fn e_block<T: Arith>(n: u32, rows: usize, gamma: usize, y: EPoint<T>) -> ScaledMatrix<T> {
    ScaledMatrix::from_fn(rows, gamma, |i, j| match y {
        EPoint::One => entry_at_one(n, i, j),
        EPoint::MinusOne => {
            let v = entry_at_one(n, i, j);
            if (n as usize + i + j) % 2 == 1 {
                -v
            } else {
                v
            }
        }
        EPoint::At(y) => legendre_deriv_in(n + i as u32, j as u32, y),
    })
}

type DenKey = (u32, u32, u32);

fn denominator_cache() -> &'static RwLock<HashMap<DenKey, Determinant<DoubleDouble>>> {
    static CACHE: OnceLock<RwLock<HashMap<DenKey, Determinant<DoubleDouble>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `det[E_α(−1) | E_β(1)]`, computed once per `(n, α, β)` in double-double.
pub(crate) fn denominator(n: u32, alpha: u32, beta: u32) -> Result<Determinant<DoubleDouble>> {
    let key = (n, alpha, beta);
    if let Some(d) = denominator_cache().read().expect("cache lock").get(&key) {
        return Ok(*d);
    }
    let rows = (alpha + beta) as usize;
    let m = e_block::<DoubleDouble>(n, rows, alpha as usize, EPoint::MinusOne)
        .hstack(&e_block(n, rows, beta as usize, EPoint::One))?;
    let d = m.det_with_conditioning()?;
    // concurrent inserts compute the same value, so last-writer-wins is harmless
    denominator_cache().write().expect("cache lock").insert(key, d);
    Ok(d)
}

/// `1 − g_{α,β}(ξ)` = `(1−ξ)^{(n+α)(n+β)} det[E_α(−(1+ξ)/(1−ξ)) | E_β(1)] / det[E_α(−1) | E_β(1)]`.
pub(crate) fn g_eval<T: Arith>(alpha: u32, beta: u32, n: u32, xi: f64) -> Result<Eval> {
    let exponent = (n as u64 + alpha as u64) * (n as u64 + beta as u64);
    let p = T::pow_unit(UnitBase::OneMinus(xi), exponent);
    if alpha == 0 {
        // the determinant ratio is identically one
        return Eval::from_tail(Tail::Survival(p), 1.0);
    }
    let x = T::from_f64(xi);
    let y = -(T::ONE + x) / (T::ONE - x);
    let rows = (alpha + beta) as usize;
    let num = e_block(n, rows, alpha as usize, EPoint::At(y))
        .hstack(&e_block(n, rows, beta as usize, EPoint::One))?
        .det_with_conditioning()?;
    let den = denominator(n, alpha, beta)?;
    let ratio = num.value / den.value.convert::<T>();
    Eval::from_tail(Tail::Survival(p * ratio), num.conditioning.min(den.conditioning))
}

/// `K_α = ∏_{k<α} 2^k / (2n+2α−2k)_k`, the reciprocal of `det E_α(1)` for an
/// `α × α` block.
pub(crate) fn k_constant<T: Arith>(n: u32, alpha: u32) -> ScaledReal<T> {
    (0..alpha as i64)
        .map(|k| pochhammer::<T>(2 * (n as i64 + alpha as i64 - k), k as u64).recip().ldexp(k))
        .product()
}

/// Smallest-eigenvalue CDF for `α₂ = 0`:
/// `1 − K_{α₁} (1−ξ)^{n²+nα₁} det E_{α₁}((1+ξ)/(1−ξ))`.
pub(crate) fn smallest_one_sided<T: Arith>(n: u32, alpha1: u32, xi: f64) -> Result<Eval> {
    let p = T::pow_unit(UnitBase::OneMinus(xi), n as u64 * (n as u64 + alpha1 as u64));
    if alpha1 == 0 {
        return Eval::from_tail(Tail::Survival(p), 1.0);
    }
    let x = T::from_f64(xi);
    let y = (T::ONE + x) / (T::ONE - x);
    let a = alpha1 as usize;
    let d = e_block(n, a, a, EPoint::At(y)).det_with_conditioning()?;
    Eval::from_tail(Tail::Survival(k_constant::<T>(n, alpha1) * p * d.value), d.conditioning)
}

/// Largest-eigenvalue CDF for `α₂ = 0`: `ξ^{n²+nα₁}`.
pub(crate) fn largest_power<T: Arith>(n: u32, alpha1: u32, xi: f64) -> Result<Eval> {
    let p = T::pow_unit(UnitBase::Value(xi), n as u64 * (n as u64 + alpha1 as u64));
    Eval::from_tail(Tail::Cdf(p), 1.0)
}

/// Largest-eigenvalue CDF for `α₁ = 0`: `K_{α₂} ξ^{n²+nα₂} det E_{α₂}(2/ξ − 1)`.
pub(crate) fn largest_one_sided<T: Arith>(n: u32, alpha2: u32, xi: f64) -> Result<Eval> {
    let p = T::pow_unit(UnitBase::Value(xi), n as u64 * (n as u64 + alpha2 as u64));
    if alpha2 == 0 || xi == 0.0 {
        return Eval::from_tail(Tail::Cdf(p), 1.0);
    }
    let x = T::from_f64(xi);
    let y = T::from_f64(2.0) / x - T::ONE;
    let a = alpha2 as usize;
    let d = e_block(n, a, a, EPoint::At(y)).det_with_conditioning()?;
    Eval::from_tail(Tail::Cdf(k_constant::<T>(n, alpha2) * p * d.value), d.conditioning)
}
