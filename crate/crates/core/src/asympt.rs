//! Hard-edge limit laws, their first-order `1/n` corrections, and the
//! Legendre-to-Bessel expansion residuals.
//!
//! All Bessel Toeplitz determinants are evaluated on the reduced series
//! `T_l(x) = I_l(√4x)/x^{l/2}` in double-double: the half-integer powers of
//! `x` cancel inside the determinant, so no square roots enter and small-`x`
//! values keep full relative accuracy.

use crate::bessel::{bessel_i, bessel_reduced_in};
use crate::error::{Error, Result};
use crate::exactdist::{EnsembleParams, Edge};
use crate::numerics::{DoubleDouble, Real, ScaledMatrix, ScaledReal};
use crate::orthopoly::legendre_deriv_in;

/// `(α, x)` for the hard-edge law `F∞^{(α)}` at `x = n²ξ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardEdgeQuery {
    pub alpha: u32,
    pub x: f64,
}

impl HardEdgeQuery {
    pub fn cdf(&self) -> Result<f64> {
        f_infinity_cdf(self.alpha, self.x)
    }

    pub fn pdf(&self) -> Result<f64> {
        f_infinity_pdf(self.alpha, self.x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionQuery {
    pub params: EnsembleParams,
    pub x: f64,
    pub edge: Edge,
}

/// Whether the first-order correction is a theorem for the parameter pair
/// or only conjectured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Proven,
    Conjectured,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Proven => "proven",
            Status::Conjectured => "conjectured",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corrected {
    pub value: f64,
    pub status: Status,
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        Err(Error::Domain(format!("hard-edge coordinate x = {x} must be >= 0")))
    } else {
        Ok(())
    }
}

/// `T'_l(x)`: `T_l` for `l ≥ 0`, `x^{|l|} T_{|l|}` for `l < 0` (from `I_{−l} = I_l`).
fn reduced(l: i64, x: DoubleDouble) -> DoubleDouble {
    let t = bessel_reduced_in(l.unsigned_abs() as u32, x);
    if l < 0 {
        t * x.powi(l.unsigned_abs() as u32)
    } else {
        t
    }
}

/// `det[I_{s+i−j}(√4x)]_{α×α} / x^{sα/2}` in double-double.
fn toeplitz_det(alpha: u32, shift: i64, x: f64) -> Result<ScaledReal<DoubleDouble>> {
    let xd = DoubleDouble::from(x);
    let a = alpha as usize;
    // Toeplitz: only 2α−1 distinct entries
    let diag: Vec<DoubleDouble> = (0..2 * a.max(1) - 1).map(|d| reduced(shift + d as i64 - (a as i64 - 1), xd)).collect();
    let m = ScaledMatrix::from_fn(a, a, |i, j| ScaledReal::from_real(diag[i + a - 1 - j]));
    m.det()
}

/// `1 − F∞^{(α)}(x) = e^{−x} det[I_{i−j}(√4x)]`, accurate in the far tail.
pub fn f_infinity_survival(alpha: u32, x: f64) -> Result<f64> {
    check_x(x)?;
    if alpha == 0 {
        return Ok((-x).exp());
    }
    let d = toeplitz_det(alpha, 0, x)?;
    Ok((d * ScaledReal::from_real(DoubleDouble::from(-x).exp())).to_f64())
}

/// `F∞^{(α)}(x) = 1 − e^{−x} det[I_{i−j}(√4x)]_{i,j=1..α}`.
pub fn f_infinity_cdf(alpha: u32, x: f64) -> Result<f64> {
    check_x(x)?;
    if alpha == 0 {
        return Ok(-(-x).exp_m1());
    }
    let d = toeplitz_det(alpha, 0, x)?;
    let s = d * ScaledReal::from_real(DoubleDouble::from(-x).exp());
    Ok((DoubleDouble::ONE - s.to_real()).to_f64().clamp(0.0, 1.0))
}

/// `f∞^{(α)}(x) = e^{−x} det[I_{2+i−j}(√4x)]_{i,j=1..α}`.
pub fn f_infinity_pdf(alpha: u32, x: f64) -> Result<f64> {
    check_x(x)?;
    if alpha == 0 {
        return Ok((-x).exp());
    }
    let d = toeplitz_det(alpha, 2, x)?;
    let xa = ScaledReal::from_real(DoubleDouble::from(x)).powi(alpha as u64);
    Ok((d * xa * ScaledReal::from_real(DoubleDouble::from(-x).exp())).to_f64())
}

/// Correction status for a `(α₁, α₂)` pair at the given edge. The smallest
/// edge is settled for `α₁ ∈ {0, 1}` and for `α₁ = 2, α₂ ≤ 2`; the largest
/// edge follows by exchanging the roles.
pub fn correction_status(params: EnsembleParams, edge: Edge) -> Status {
    let (own, other) = match edge {
        Edge::Smallest => (params.alpha1, params.alpha2),
        Edge::Largest => (params.alpha2, params.alpha1),
    };
    if own <= 1 || (own == 2 && other <= 2) {
        Status::Proven
    } else {
        Status::Conjectured
    }
}

/// `F∞^{(a)}(x) + ((α₁+α₂)/n) x f∞^{(a)}(x)` with `a = α₁` at the smallest
/// edge and `a = α₂` at the largest (where `x = n²(1−ξ)` and the value
/// approximates `P(φ₁ ≥ 1 − x/n²)`).
pub fn corrected_cdf(q: &CorrectionQuery) -> Result<Corrected> {
    check_x(q.x)?;
    let p = q.params;
    let a = match q.edge {
        Edge::Smallest => p.alpha1,
        Edge::Largest => p.alpha2,
    };
    let c = (p.alpha1 + p.alpha2) as f64 / p.n as f64;
    let value = f_infinity_cdf(a, q.x)? + c * q.x * f_infinity_pdf(a, q.x)?;
    Ok(Corrected { value, status: correction_status(p, q.edge) })
}

/// The JUE smallest-eigenvalue law near `−1`, with `x` the magnification of
/// `1 + φ̃`: `F∞(x/2) + ((α₁+α₂)/(2n)) x f∞(x/2)`.
pub fn jue_corrected_cdf(params: EnsembleParams, x: f64) -> Result<f64> {
    check_x(x)?;
    let a = params.alpha1;
    let c = (params.alpha1 + params.alpha2) as f64 / (2.0 * params.n as f64);
    Ok(f_infinity_cdf(a, x / 2.0)? + c * x * f_infinity_pdf(a, x / 2.0)?)
}

/// The LUE smallest-eigenvalue analogue: `F∞(x/2) + (α/(2n)) x f∞(x/2)`.
pub fn lue_reference_cdf(alpha: u32, n: u32, x: f64) -> Result<f64> {
    check_x(x)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let c = alpha as f64 / (2.0 * n as f64);
    Ok(f_infinity_cdf(alpha, x / 2.0)? + c * x * f_infinity_pdf(alpha, x / 2.0)?)
}

/// `e^x (α₁+α₂) d/dx[x f∞^{(α₁)}(x)]`, the shape of the first-order density
/// correction. Closed forms for `α₁ ≤ 2`, finite differences beyond.
pub fn scaled_correction_density(alpha1: u32, alpha2: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!("x = {x} must be > 0")));
    }
    let s = (alpha1 + alpha2) as f64;
    let z = (4.0 * x).sqrt();
    match alpha1 {
        0 => Ok(s * (1.0 - x)),
        1 => Ok(s * (x.sqrt() * bessel_i(1, z)? - x * bessel_i(2, z)?)),
        2 => {
            let (i0, i1) = (bessel_i(0, z)?, bessel_i(1, z)?);
            let a = (1.0 - x) * (i0 * i0 - (1.0 + 1.0 / x) * i1 * i1);
            let b = x * (i1 * i1 * (1.0 / x + 2.0 / (x * x)) - 2.0 / (x * x.sqrt()) * i0 * i1);
            Ok(s * (a + b))
        }
        _ => scaled_correction_density_numeric(alpha1, alpha2, x),
    }
}

/// [`scaled_correction_density`] by a Richardson-extrapolated central
/// difference of `x f∞(x)`, for any `α₁`.
pub fn scaled_correction_density_numeric(alpha1: u32, alpha2: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!("x = {x} must be > 0")));
    }
    let h = (1e-3 * x).min(1e-2);
    let g = |t: f64| -> Result<f64> { Ok(t * f_infinity_pdf(alpha1, t)?) };
    let d1 = (g(x + h)? - g(x - h)?) / (2.0 * h);
    let d2 = (g(x + h / 2.0)? - g(x - h / 2.0)?) / h;
    let d = (4.0 * d2 - d1) / 3.0;
    Ok((alpha1 + alpha2) as f64 * x.exp() * d)
}

/// Deviations of scaled Legendre derivatives from their Bessel limits.
///
/// With `y = (1+x/n²)/(1−x/n²)`:
/// * `residual_deriv = n^{−2m} P^{(m)}_{n+c}(y) − [I_m/(4x)^{m/2} + (1+2c)/(2n) · I_{m−1}/(4x)^{(m−1)/2}]`
/// * `residual_assoc = n^{−m}(y²−1)^{m/2} P^{(m)}_{n+c}(y) − [I_m + (1+2c)√x I_{m−1}/n]`
///
/// Bessel functions are at `√4x`. The associated-function comparison uses
/// the real magnitude `(y²−1)^{m/2} P^{(m)}`: for `y > 1` the associated
/// Legendre function carries a constant phase `(−i)^m`, which is dropped here
/// rather than carried through complex arithmetic.
pub fn lemma3_residuals(m: u32, c: i32, n: u32, x: f64) -> Result<(f64, f64)> {
    if n < 8.max(2 * m) {
        return Err(Error::InvalidInput(format!("n = {n} must be >= max(8, 2m) = {}", 8.max(2 * m))));
    }
    check_x(x)?;
    let nf = n as f64;
    let u = x / (nf * nf);
    if u >= 1.0 {
        return Err(Error::Domain(format!("x = {x} must be < n² = {}", nf * nf)));
    }
    let degree = n as i64 + c as i64;
    if degree < 0 {
        return Err(Error::InvalidInput(format!("n + c = {degree} is negative")));
    }
    let y = (1.0 + u) / (1.0 - u);
    let d = legendre_deriv_in::<f64>(degree as u32, m, y);
    let k = (1 + 2 * c) as f64;

    // I_l(√4x)/(4x)^{l/2} = T_l(x)/2^l, and (4x)^{1/2} I_1(√4x) = 2x T_1(x) for l = −1
    let norm = |l: i64| -> f64 {
        if l >= 0 {
            bessel_reduced_in(l as u32, x).ldexp(-(l as i32))
        } else {
            2.0 * x * bessel_reduced_in(1, x)
        }
    };
    let lead = d * ScaledReal::from_f64(nf).powi(2 * m as u64).recip();
    let residual_deriv = lead.to_f64() - (norm(m as i64) + k / (2.0 * nf) * norm(m as i64 - 1));

    let w = ((y - 1.0) * (y + 1.0)).sqrt();
    let assoc = d * ScaledReal::from_f64(w / nf).powi(m as u64);
    let z = (4.0 * x).sqrt();
    let prev = bessel_i((m as i64 - 1).abs(), z)?;
    let residual_assoc = assoc.to_f64() - (bessel_i(m as i64, z)? + k * x.sqrt() * prev / nf);
    Ok((residual_deriv, residual_assoc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: u32, a1: u32, a2: u32) -> EnsembleParams {
        EnsembleParams::new(n, a1, a2).unwrap()
    }

    #[test]
    fn cdf_examples() {
        for &x in &[0.0, 0.3, 2.0, 17.0] {
            assert_relative_eq!(f_infinity_cdf(0, x).unwrap(), 1.0 - (-x).exp(), max_relative = 1e-14);
            let z = (4.0 * x).sqrt();
            let want = 1.0 - (-x).exp() * bessel_i(0, z).unwrap();
            assert!((f_infinity_cdf(1, x).unwrap() - want).abs() < 1e-14);
        }
        let (i0, i1) = (bessel_i(0, 2.0).unwrap(), bessel_i(1, 2.0).unwrap());
        assert_relative_eq!(f_infinity_cdf(2, 1.0).unwrap(), 1.0 - (-1.0f64).exp() * (i0 * i0 - i1 * i1), max_relative = 1e-13);
        assert_eq!(f_infinity_cdf(3, 0.0).unwrap(), 0.0);
        assert!(f_infinity_cdf(1, -1.0).is_err());
        assert!(f_infinity_pdf(1, -1.0).is_err());
    }

    #[test]
    fn toeplitz_matrix_agrees_with_direct_bessel_determinant() {
        for alpha in 1..=4u32 {
            for &x in &[0.5, 3.0, 9.0] {
                let z = (4.0 * x).sqrt();
                let a = alpha as usize;
                let direct = ScaledMatrix::<f64>::from_fn(a, a, |i, j| {
                    ScaledReal::from_f64(bessel_i(i as i64 - j as i64, z).unwrap())
                })
                .det()
                .unwrap()
                .to_f64();
                let s = f_infinity_survival(alpha, x).unwrap();
                assert_relative_eq!(s, (-x).exp() * direct, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn pdf_examples_and_derivative() {
        for &x in &[0.1, 1.0, 5.0] {
            assert_relative_eq!(f_infinity_pdf(0, x).unwrap(), (-x).exp());
            let z = (4.0 * x).sqrt();
            assert_relative_eq!(f_infinity_pdf(1, x).unwrap(), (-x).exp() * bessel_i(2, z).unwrap(), max_relative = 1e-13);
        }
        for alpha in 0..=4 {
            let mut x: f64 = 0.01;
            while x <= 20.0 {
                let h = 1e-5 * x.max(1.0);
                let fd = (f_infinity_cdf(alpha, x + h).unwrap() - f_infinity_cdf(alpha, x - h).unwrap()) / (2.0 * h);
                assert!((fd - f_infinity_pdf(alpha, x).unwrap()).abs() < 1e-6, "alpha={alpha} x={x}");
                x *= 1.3;
            }
        }
    }

    #[test]
    fn survival_has_relative_accuracy_in_the_tail() {
        // 1 − F∞(50) from 30-digit arithmetic
        let want = [
            1.928749848e-22,
            2.862632565e-17,
            3.006477914e-13,
            4.469293639e-10,
            1.410820459e-7,
            1.261222589e-5,
            3.992478318e-4,
        ];
        for (a, w) in want.iter().enumerate() {
            assert_relative_eq!(f_infinity_survival(a as u32, 50.0).unwrap(), *w, max_relative = 1e-9);
        }
    }

    #[test]
    fn correction_limits_and_alpha_zero_expansion() {
        let p = params(1_000_000, 2, 1);
        let x = 1.3;
        let c = corrected_cdf(&CorrectionQuery { params: p, x, edge: Edge::Smallest }).unwrap();
        assert!((c.value - f_infinity_cdf(2, x).unwrap()).abs() < 1e-5);
        assert_eq!(c.status, Status::Proven);
        let p = params(40, 0, 3);
        let c = corrected_cdf(&CorrectionQuery { params: p, x, edge: Edge::Smallest }).unwrap();
        assert_relative_eq!(c.value, 1.0 - (-x).exp() + 3.0 / 40.0 * x * (-x).exp(), max_relative = 1e-14);
    }

    #[test]
    fn correction_status_table() {
        let s = |a1, a2, e| correction_status(params(10, a1, a2), e);
        assert_eq!(s(0, 7, Edge::Smallest), Status::Proven);
        assert_eq!(s(1, 3, Edge::Smallest), Status::Proven);
        assert_eq!(s(2, 2, Edge::Smallest), Status::Proven);
        assert_eq!(s(2, 3, Edge::Smallest), Status::Conjectured);
        assert_eq!(s(3, 0, Edge::Smallest), Status::Conjectured);
        assert_eq!(s(3, 0, Edge::Largest), Status::Proven);
        assert_eq!(s(2, 3, Edge::Largest), Status::Conjectured);
    }

    #[test]
    fn corrected_gap_is_second_order() {
        let p = params(100, 2, 1);
        let exact = crate::exactdist::smallest_cdf(p, 1.0 / 1e4).unwrap();
        let c = corrected_cdf(&CorrectionQuery { params: p, x: 1.0, edge: Edge::Smallest }).unwrap().value;
        let plain = f_infinity_cdf(2, 1.0).unwrap();
        assert!((exact - c).abs() < 10.0 / 1e4, "{exact} {c}");
        assert!((exact - c).abs() < 0.2 * (exact - plain).abs());
    }

    #[test]
    fn jue_and_lue_forms() {
        let p = params(30, 3, 0);
        for &x in &[0.0, 0.4, 2.5] {
            assert_eq!(jue_corrected_cdf(p, x).unwrap(), lue_reference_cdf(3, 30, x).unwrap());
        }
        assert_eq!(jue_corrected_cdf(params(30, 1, 2), 0.0).unwrap(), 0.0);
        let p = params(30, 1, 2);
        let via = corrected_cdf(&CorrectionQuery { params: p, x: 0.7, edge: Edge::Smallest }).unwrap().value;
        let f = f_infinity_cdf(1, 0.7).unwrap();
        let direct = jue_corrected_cdf(p, 1.4).unwrap();
        assert_relative_eq!(direct - f, via - f, max_relative = 1e-12);
    }

    #[test]
    fn scaled_correction_branches() {
        for &x in &[0.3, 1.0, 4.0] {
            assert_relative_eq!(scaled_correction_density(0, 3, x).unwrap(), 3.0 * (1.0 - x), max_relative = 1e-14);
        }
        // closed form at α₁ = 2, α₂ = 0, x = 1 with I₀(2), I₁(2)
        let (i0, i1) = (bessel_i(0, 2.0).unwrap(), bessel_i(1, 2.0).unwrap());
        let want = 2.0 * (i1 * i1 * 3.0 - 2.0 * i0 * i1);
        assert_relative_eq!(scaled_correction_density(2, 0, 1.0).unwrap(), want, max_relative = 1e-14);
        for a1 in 0..=2 {
            for &x in &[0.5, 1.0, 2.0] {
                let closed = scaled_correction_density(a1, 1, x).unwrap();
                let fd = scaled_correction_density_numeric(a1, 1, x).unwrap();
                assert!((closed - fd).abs() < 1e-6, "a1={a1} x={x}: {closed} vs {fd}");
            }
        }
        assert!(scaled_correction_density(1, 1, 0.0).is_err());
    }

    #[test]
    fn expansion_residuals_edge_cases_and_rates() {
        let (d, a) = lemma3_residuals(0, 0, 20, 0.0).unwrap();
        assert!(d.abs() < 1e-12 && a.abs() < 1e-12);
        assert!(lemma3_residuals(5, 0, 8, 1.0).is_err());
        assert!(lemma3_residuals(1, 0, 8, -1.0).is_err());
        for m in 0..=3 {
            for &c in &[-1, 0, 2] {
                for &x in &[0.5, 2.0] {
                    let (d1, a1) = lemma3_residuals(m, c, 40, x).unwrap();
                    let (d2, a2) = lemma3_residuals(m, c, 80, x).unwrap();
                    let (rd, ra) = (d2 / d1, a2 / a1);
                    assert!((0.15..=0.4).contains(&rd), "deriv m={m} c={c} x={x}: {rd}");
                    assert!((0.15..=0.4).contains(&ra), "assoc m={m} c={c} x={x}: {ra}");
                }
            }
        }
    }
}
