//! Brute-force oracle: integrate the eigenvalue joint density directly.

use crate::error::{Error, Result};
use crate::exactdist::EnsembleParams;
use crate::numerics::quad::integrate;

const TOL: f64 = 1e-13;

/// `∫_{[lo,1]^n} ∏ φ_k^{α₁}(1−φ_k)^{α₂} ∏_{i<j}(φ_i−φ_j)² dφ` by nested
/// adaptive Gauss–Kronrod.
fn mass(n: u32, a1: i32, a2: i32, lo: f64) -> f64 {
    let w = |t: f64| t.powi(a1) * (1.0 - t).powi(a2);
    let outer = |f: &mut dyn FnMut(f64) -> f64| integrate(f, lo, 1.0, 0.0, TOL).0;
    match n {
        1 => outer(&mut |t| w(t)),
        2 => outer(&mut |s| {
            let ws = w(s);
            integrate(|t| ws * w(t) * (s - t).powi(2), lo, 1.0, 0.0, TOL).0
        }),
        3 => outer(&mut |r| {
            let wr = w(r);
            integrate(
                |s| {
                    let wrs = wr * w(s) * (r - s).powi(2);
                    integrate(|t| wrs * w(t) * ((r - t) * (s - t)).powi(2), lo, 1.0, 0.0, TOL).0
                },
                lo,
                1.0,
                0.0,
                TOL,
            )
            .0
        }),
        _ => unreachable!(),
    }
}

/// `P(φₙ ≤ ξ) = 1 − mass([ξ,1]ⁿ)/mass([0,1]ⁿ)`, with the normalization
/// computed by the same quadrature instead of a closed-form constant.
pub fn jpdf_quadrature_cdf(params: EnsembleParams, xi: f64) -> Result<f64> {
    let EnsembleParams { n, alpha1, alpha2 } = params;
    if n > 3 {
        return Err(Error::OracleLimit(format!("quadrature oracle supports n <= 3, got {n}")));
    }
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::Domain(format!("xi = {xi} outside [0, 1)")));
    }
    if xi == 0.0 {
        return Ok(0.0);
    }
    let (a1, a2) = (alpha1 as i32, alpha2 as i32);
    Ok(1.0 - mass(n, a1, a2, xi) / mass(n, a1, a2, 0.0))
}
