//! Small dense matrices of [`ScaledReal`] and their determinants.

use super::real::Real;
use super::scaled::ScaledReal;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ScaledMatrix<T: Real = f64> {
    rows: usize,
    cols: usize,
    entries: Vec<ScaledReal<T>>,
}

/// Determinant together with a conditioning indicator.
#[derive(Clone, Copy, Debug)]
pub struct Determinant<T: Real = f64> {
    pub value: ScaledReal<T>,
    /// `|det|` divided by the product of the column max-magnitudes; small
    /// values mean heavy cancellation during elimination.
    pub conditioning: f64,
}

impl<T: Real> ScaledMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![ScaledReal::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ScaledReal::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ScaledReal<T>) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| ScaledReal::from_f64(rows[i][j])))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> ScaledReal<T> {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ScaledReal<T>) {
        self.entries[i * self.cols + j] = v;
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot stack {}-row and {}-row blocks",
                self.rows, other.rows
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        }))
    }

    /// Scales column `j` by `c`.
    pub fn scale_col(&mut self, j: usize, c: ScaledReal<T>) {
        for i in 0..self.rows {
            let v = self.get(i, j) * c;
            self.set(i, j, v);
        }
    }

    pub fn det(&self) -> Result<ScaledReal<T>> {
        Ok(self.det_with_conditioning()?.value)
    }

    /// LU with partial pivoting after normalizing each column by the power
    /// of two of its largest entry. The scalings are exact and folded back
    /// into the exponent of the result.
    pub fn det_with_conditioning(&self) -> Result<Determinant<T>> {
        if self.rows != self.cols {
            return Err(Error::InvalidInput(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Determinant { value: ScaledReal::ONE, conditioning: 1.0 });
        }
        let mut a = self.entries.clone();
        let mut shift = 0i64;
        for j in 0..n {
            let top = (0..n)
                .map(|i| a[i * n + j])
                .filter(|v| !v.is_zero())
                .map(|v| v.exponent())
                .max();
            match top {
                None => return Ok(Determinant { value: ScaledReal::ZERO, conditioning: 0.0 }),
                Some(e) => {
                    shift += e;
                    for i in 0..n {
                        a[i * n + j] = a[i * n + j].ldexp(-e);
                    }
                }
            }
        }
        // column maxima are now in [1,2); their product bounds |det| up to n!
        let col_max: ScaledReal<T> = (0..n)
            .map(|j| (0..n).map(|i| a[i * n + j].abs()).fold(ScaledReal::ZERO, |m, v| if v > m { v } else { m }))
            .product();

        let mut det = ScaledReal::<T>::ONE;
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if a[i * n + k].abs() > a[p * n + k].abs() {
                    p = i;
                }
            }
            let pivot = a[p * n + k];
            if pivot.is_zero() {
                return Ok(Determinant { value: ScaledReal::ZERO, conditioning: 0.0 });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            det = det * pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    a[i * n + j] = a[i * n + j] - f * a[k * n + j];
                }
            }
        }
        let conditioning = (det.abs() / col_max).to_f64();
        Ok(Determinant { value: det.ldexp(shift), conditioning })
    }
}
