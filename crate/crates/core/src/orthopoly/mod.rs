//! Legendre, associated/shifted Legendre and Jacobi polynomials at real
//! arguments (including `|y| > 1`), plus an exact-coefficient oracle.

mod exact;
pub mod identities;
mod jacobi;
mod legendre;

pub use exact::{exact_rodrigues_derivative, Dyadic, ExactPolynomial, MAX_RODRIGUES_DEGREE};
pub use jacobi::{jacobi_deriv_in, jacobi_explicit, jacobi_in};
pub use legendre::{assoc_legendre, legendre, legendre_deriv, legendre_deriv_in, legendre_in, shifted_legendre};

use crate::numerics::ScaledReal;

/// Degree, derivative order and argument of a Legendre evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyQuery {
    pub n: u32,
    pub m: u32,
    pub y: f64,
}

/// Degree, integer parameters, derivative order and argument of a Jacobi
/// evaluation. Parameters may be negative down to `−n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiQuery {
    pub n: u32,
    pub a: i64,
    pub b: i64,
    pub k: u32,
    pub y: f64,
}

impl PolyQuery {
    pub fn eval(&self) -> ScaledReal {
        legendre_deriv(self.n, self.m, self.y)
    }
}

impl JacobiQuery {
    pub fn eval(&self) -> ScaledReal {
        jacobi_deriv(self.n, self.a, self.b, self.k, self.y)
    }
}

pub fn jacobi(n: u32, a: i64, b: i64, y: f64) -> ScaledReal {
    jacobi_in(n, a, b, y)
}

pub fn jacobi_deriv(n: u32, a: i64, b: i64, k: u32, y: f64) -> ScaledReal {
    jacobi_deriv_in(n, a, b, k, y)
}
