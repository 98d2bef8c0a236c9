//! Overflow-safe scalars, a double-double backend, and small determinants.

mod matrix;
pub mod quad;
mod real;
mod scaled;

pub use matrix::{Determinant, ScaledMatrix};
pub use real::{DoubleDouble, Real};
pub use scaled::{factorial, factorial_ratio, normalize, pochhammer, pow_scaled, pow_scaled_in, ScaledReal};

use crate::error::{Error, Result};

/// Arithmetic used by the exact-distribution kernels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    Double,
    DoubleDouble,
    /// Double, escalating to double-double when `n > 100` or when the
    /// computation reports heavy cancellation.
    #[default]
    Auto,
}

pub const PRECISION_ENV: &str = "JACOBI_EDGE_PRECISION";

impl Precision {
    /// Reads [`PRECISION_ENV`]; unset means [`Precision::Auto`].
    pub fn from_env() -> Result<Self> {
        match std::env::var(PRECISION_ENV) {
            Err(_) => Ok(Self::Auto),
            Ok(v) => v.parse(),
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Ok(Self::Double),
            "double-double" => Ok(Self::DoubleDouble),
            "auto" | "" => Ok(Self::Auto),
            other => Err(Error::InvalidInput(format!(
                "{PRECISION_ENV}={other}: expected double or double-double"
            ))),
        }
    }
}
