//! Exact, asymptotic and finite-n corrected distributions of the extreme
//! eigenvalues of complex double-Wishart (Jacobi unitary / complex F)
//! matrices, with Monte Carlo and quadrature cross-checks.

pub mod asympt;
pub mod bessel;
pub mod error;
pub mod exactdist;
pub mod montecarlo;
pub mod numerics;
pub mod orthopoly;
pub mod validation;

pub use error::{Error, Result};
