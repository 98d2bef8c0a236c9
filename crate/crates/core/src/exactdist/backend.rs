//! Precision-specific pieces of the exact CDF evaluation.

use crate::error::{Error, Result};
use crate::numerics::{DoubleDouble, Precision, Real, ScaledReal};

/// Arithmetic backends for the exact routes. The two implementations
/// differ only in how powers and the final `1 − S` are formed.
pub(crate) trait Arith: Real {
    /// `base^e` for `base ∈ [0, 1]`.
    fn pow_unit(base: UnitBase, e: u64) -> ScaledReal<Self>;
    /// `1 − s` as a double.
    fn complement(s: ScaledReal<Self>) -> f64;
}

/// A number in `[0,1]` given either directly or as `1 − ξ`, so that the
/// double-double backend can form `1 − ξ` exactly.
#[derive(Clone, Copy, Debug)]
pub(crate) enum UnitBase {
    Value(f64),
    OneMinus(f64),
}

/// `exp(l)` as an extended-exponent double.
fn exp_scaled(l: f64) -> ScaledReal<f64> {
    if l == f64::NEG_INFINITY {
        return ScaledReal::ZERO;
    }
    let e = (l / std::f64::consts::LN_2).floor();
    let r = l - e * std::f64::consts::LN_2;
    ScaledReal::from_parts(r.exp(), e as i64)
}

impl Arith for f64 {
    fn pow_unit(base: UnitBase, e: u64) -> ScaledReal<f64> {
        if e == 0 {
            return ScaledReal::ONE;
        }
        // log-domain keeps the relative error at |e·ln b|·ε instead of e·ε
        let l = match base {
            UnitBase::Value(b) => b.ln(),
            UnitBase::OneMinus(xi) => (-xi).ln_1p(),
        };
        exp_scaled(e as f64 * l)
    }

    fn complement(s: ScaledReal<f64>) -> f64 {
        if s.is_negative() || s.is_zero() {
            1.0 - s.to_f64()
        } else {
            -s.ln_abs().exp_m1()
        }
    }
}

impl Arith for DoubleDouble {
    fn pow_unit(base: UnitBase, e: u64) -> ScaledReal<DoubleDouble> {
        let b = match base {
            UnitBase::Value(b) => DoubleDouble::from(b),
            UnitBase::OneMinus(xi) => DoubleDouble::ONE - DoubleDouble::from(xi),
        };
        ScaledReal::from_real(b).powi(e)
    }

    fn complement(s: ScaledReal<DoubleDouble>) -> f64 {
        (DoubleDouble::ONE - s.to_real()).to_f64()
    }
}

/// Outcome of one exact evaluation: the CDF, its complement, and how much
/// cancellation the determinant and entry sums suffered.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Eval {
    pub cdf: f64,
    pub survival: f64,
    pub conditioning: f64,
}

/// Which tail a route's closed form produces directly.
pub(crate) enum Tail<T: Real> {
    Survival(ScaledReal<T>),
    Cdf(ScaledReal<T>),
}

const CLAMP: f64 = 1e-9;

impl Eval {
    pub fn from_tail<T: Arith>(tail: Tail<T>, conditioning: f64) -> Result<Self> {
        let (cdf, survival) = match tail {
            Tail::Survival(s) => (T::complement(s), s.to_f64()),
            Tail::Cdf(c) => (c.to_f64(), T::complement(c)),
        };
        if !(-CLAMP..=1.0 + CLAMP).contains(&cdf) {
            return Err(Error::NumericalQuality(format!(
                "CDF value {cdf:e} outside [0,1] by more than {CLAMP:e} (conditioning {conditioning:e})"
            )));
        }
        Ok(Self { cdf: cdf.clamp(0.0, 1.0), survival: survival.clamp(0.0, 1.0), conditioning })
    }

    pub fn exact(cdf: f64) -> Self {
        Self { cdf, survival: 1.0 - cdf, conditioning: 1.0 }
    }
}

/// Degree above which double-double is used unconditionally under
/// [`Precision::Auto`].
pub(crate) const AUTO_DEGREE: u32 = 100;
/// Conditioning ratio below which the double result is recomputed.
pub(crate) const AUTO_CONDITIONING: f64 = 1e-10;
/// CDF values below this come from `1 − S` with `S ≈ 1`; the double result
/// has lost too many digits and is recomputed.
pub(crate) const AUTO_CANCELLATION: f64 = 1e-3;

/// Runs the double evaluation, the double-double one, or both, per `precision`.
pub(crate) fn dispatch(
    precision: Precision,
    n: u32,
    double: impl FnOnce() -> Result<Eval>,
    extended: impl FnOnce() -> Result<Eval>,
) -> Result<Eval> {
    match precision {
        Precision::Double => double(),
        Precision::DoubleDouble => extended(),
        Precision::Auto => {
            if n > AUTO_DEGREE {
                return extended();
            }
            match double() {
                Ok(e) if e.conditioning >= AUTO_CONDITIONING && e.cdf >= AUTO_CANCELLATION => Ok(e),
                Ok(_) | Err(Error::NumericalQuality(_)) => extended(),
                Err(other) => Err(other),
            }
        }
    }
}
