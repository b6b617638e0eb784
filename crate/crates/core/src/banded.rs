//! Banded LU factorization with partial pivoting for a single right-hand
//! side.

use crate::error::{Error, Result};

/// Square matrix with `lower` sub-diagonals and `upper` super-diagonals.
///
/// Each row stores the columns `i - lower ..= i + upper + lower`; the extra
/// `lower` columns hold fill-in created by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        BandedMatrix {
            n,
            lower,
            upper,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, row: usize, col: usize) -> usize {
        debug_assert!(col + self.lower >= row && col <= row + self.upper + self.lower);
        row * self.width + (col + self.lower - row)
    }

    /// Entry `(row, col)`; zero outside the stored band.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        if col + self.lower < row || col > row + self.upper + self.lower {
            return 0.0;
        }
        self.data[self.slot(row, col)]
    }

    /// Adds `value` to `(row, col)`, which must lie inside the declared band.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        assert!(
            col + self.lower >= row && col <= row + self.upper,
            "({row}, {col}) outside band"
        );
        let s = self.slot(row, col);
        self.data[s] += value;
    }

    /// Solves `A x = rhs` in place, consuming the matrix.
    pub fn solve(mut self, rhs: &mut [f64]) -> Result<()> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let reach = self.lower + self.upper;
        for k in 0..n {
            let last_row = (k + self.lower).min(n - 1);
            let last_col = (k + reach).min(n - 1);

            let mut pivot = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    pivot = i;
                }
            }
            if !(best > 0.0 && best.is_finite()) {
                return Err(Error::SingularSystem(k));
            }
            if pivot != k {
                for j in k..=last_col {
                    let (a, b) = (self.slot(k, j), self.slot(pivot, j));
                    self.data.swap(a, b);
                }
                rhs.swap(k, pivot);
            }

            let diag = self.get(k, k);
            for i in k + 1..=last_row {
                let s = self.slot(i, k);
                let factor = self.data[s] / diag;
                if factor == 0.0 {
                    continue;
                }
                self.data[s] = 0.0;
                for j in k + 1..=last_col {
                    let src = self.data[self.slot(k, j)];
                    let dst = self.slot(i, j);
                    self.data[dst] -= factor * src;
                }
                rhs[i] -= factor * rhs[k];
            }
        }

        for i in (0..n).rev() {
            let last_col = (i + reach).min(n - 1);
            let mut acc = rhs[i];
            for j in i + 1..=last_col {
                acc -= self.get(i, j) * rhs[j];
            }
            rhs[i] = acc / self.get(i, i);
        }
        Ok(())
    }
}
