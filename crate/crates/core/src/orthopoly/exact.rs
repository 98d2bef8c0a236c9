//! Exact dyadic-coefficient polynomials, used as an identity oracle.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::ScaledReal;

/// Largest degree accepted by [`exact_rodrigues_derivative`].
pub const MAX_RODRIGUES_DEGREE: u32 = 16;

/// `Σ_k coeffs[k] x^k / 2^shift`, exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPolynomial {
    coeffs: Vec<BigInt>,
    shift: u32,
}

/// Exact dyadic rational `num / 2^shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub num: BigInt,
    pub shift: u64,
}

impl Dyadic {
    /// Nearest double (ties resolved by truncating below 64 significant bits).
    pub fn to_f64(&self) -> f64 {
        self.to_scaled().to_f64()
    }

    pub fn to_scaled(&self) -> ScaledReal {
        if self.num.is_zero() {
            return ScaledReal::ZERO;
        }
        let bits = self.num.bits();
        let drop = bits.saturating_sub(64);
        let top: BigInt = self.num.abs() >> drop;
        let m = top.to_u64().expect("fits in 64 bits") as f64;
        let m = if self.num.sign() == Sign::Minus { -m } else { m };
        ScaledReal::from_parts(m, drop as i64 - self.shift as i64)
    }
}

impl ExactPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new(), shift: 0 }
    }

    /// Integer-coefficient polynomial from ascending coefficients.
    pub fn from_integers<I: Into<BigInt>>(coeffs: impl IntoIterator<Item = I>) -> Self {
        let mut p = Self { coeffs: coeffs.into_iter().map(Into::into).collect(), shift: 0 };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        // keep the representation canonical: strip common factors of two
        while self.shift > 0 && self.coeffs.iter().all(|c| (c & BigInt::one()).is_zero()) {
            for c in &mut self.coeffs {
                *c >>= 1;
            }
            self.shift -= 1;
        }
        if self.coeffs.is_empty() {
            self.shift = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn denominator_log2(&self) -> u32 {
        self.shift
    }

    fn lift(&self, shift: u32) -> Vec<BigInt> {
        self.coeffs.iter().map(|c| c << (shift - self.shift)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let shift = self.shift.max(other.shift);
        let (a, b) = (self.lift(shift), other.lift(shift));
        let len = a.len().max(b.len());
        let coeffs = (0..len)
            .map(|k| a.get(k).cloned().unwrap_or_default() + b.get(k).cloned().unwrap_or_default())
            .collect();
        let mut p = Self { coeffs, shift };
        p.trim();
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let mut p = Self { coeffs, shift: self.shift + other.shift };
        p.trim();
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::from_integers([1]), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut p = Self { coeffs: self.coeffs.iter().map(|c| c * k).collect(), shift: self.shift };
        p.trim();
        p
    }

    /// Multiplies by `2^-k`.
    pub fn halve(&self, k: u32) -> Self {
        let mut p = Self { coeffs: self.coeffs.clone(), shift: self.shift + k };
        p.trim();
        p
    }

    /// Divides by an integer that must divide every coefficient.
    pub fn div_exact(&self, d: &BigInt) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !(c % d).is_zero() {
                return Err(Error::InvalidInput(format!("{d} does not divide coefficient {c}")));
            }
            coeffs.push(c / d);
        }
        Ok(Self { coeffs, shift: self.shift })
    }

    /// `x · p(x)`
    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigInt::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs, shift: self.shift }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect();
        let mut p = Self { coeffs, shift: self.shift };
        p.trim();
        p
    }

    pub fn nth_derivative(&self, d: u32) -> Self {
        (0..d).fold(self.clone(), |p, _| p.derivative())
    }

    /// Exact value at a double (every finite double is a dyadic rational).
    pub fn eval_exact(&self, x: f64) -> Dyadic {
        assert!(x.is_finite());
        // x = xm · 2^xe with integer xm
        let (xm, xe) = if x == 0.0 {
            (BigInt::zero(), 0i64)
        } else {
            let e = ScaledReal::<f64>::from_f64(x).exponent() - 52;
            let m = ScaledReal::<f64>::from_f64(x).ldexp(-e).to_f64();
            (BigInt::from(m as i64), e)
        };
        // Horner over integers. For xe < 0 every term is brought over the
        // common denominator 2^{deg·|xe|}.
        let deg = self.coeffs.len().saturating_sub(1) as i64;
        let mut acc = BigInt::zero();
        let base_shift = if xe < 0 { -xe } else { 0 };
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            acc *= &xm;
            if xe > 0 {
                acc <<= xe as u64;
            }
            acc += c << (base_shift as u64 * (deg as u64 - k as u64));
        }
        Dyadic { num: acc, shift: self.shift as u64 + (deg as u64) * base_shift as u64 }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval_exact(x).to_f64()
    }
}

/// The exact polynomial `d^d/dx^d (x² − 1)^n`.
pub fn exact_rodrigues_derivative(n: u32, d: u32) -> Result<ExactPolynomial> {
    if n > MAX_RODRIGUES_DEGREE {
        return Err(Error::OracleLimit(format!("Rodrigues oracle limited to n <= {MAX_RODRIGUES_DEGREE}, got {n}")));
    }
    if d > 2 * n + 2 {
        return Err(Error::OracleLimit(format!("derivative order {d} exceeds 2n+2 = {}", 2 * n + 2)));
    }
    let base = ExactPolynomial::from_integers([-1, 0, 1]);
    Ok(base.pow(n).nth_derivative(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(n: u32) -> BigInt {
        (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
    }

    #[test]
    fn examples() {
        assert_eq!(exact_rodrigues_derivative(1, 0).unwrap(), ExactPolynomial::from_integers([-1, 0, 1]));
        assert_eq!(exact_rodrigues_derivative(1, 2).unwrap(), ExactPolynomial::from_integers([2]));
        assert!(exact_rodrigues_derivative(1, 3).unwrap().is_zero());
        assert!(exact_rodrigues_derivative(1, 5).is_err());
        assert!(matches!(exact_rodrigues_derivative(17, 0), Err(Error::OracleLimit(_))));
        for n in 0..=MAX_RODRIGUES_DEGREE {
            let p = exact_rodrigues_derivative(n, n).unwrap().div_exact(&fact(n)).unwrap().halve(n);
            assert_eq!(p.eval_exact(1.0).to_f64(), 1.0, "P_{n}(1)");
        }
    }

    #[test]
    fn exact_evaluation_at_dyadic_points() {
        // x² − 1 at 0.75 = −7/16
        let p = ExactPolynomial::from_integers([-1, 0, 1]);
        assert_eq!(p.eval_f64(0.75), -0.4375);
        assert_eq!(p.eval_f64(3.0), 8.0);
        assert_eq!(p.eval_f64(0.0), -1.0);
        assert_eq!(p.halve(3).eval_f64(-3.0), 1.0);
        let q = p.pow(3).mul_x(); // x(x²−1)³
        assert_eq!(q.eval_f64(1.5), 1.5 * 1.25f64.powi(3));
        let big = q.eval_f64(-1e10);
        assert!((big / -1e70 - 1.0).abs() < 1e-15, "{big}");
    }

    #[test]
    fn arithmetic_is_exact() {
        let p = ExactPolynomial::from_integers([3, -2, 5]).halve(2);
        let q = ExactPolynomial::from_integers([1, 1]);
        let s = p.add(&q).sub(&q);
        assert_eq!(s, p);
        assert_eq!(p.mul(&q).degree(), Some(3));
        assert_eq!(p.halve(1).add(&p.halve(1)), p);
        assert!(ExactPolynomial::from_integers([2, 4]).div_exact(&BigInt::from(3)).is_err());
    }
}
