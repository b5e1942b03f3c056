//! Dense linear solves for exact policy evaluation.

use alloc::vec::Vec;

use crate::math::abs;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: alloc::vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] += value;
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] = value;
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot is exactly zero.
pub fn solve(mut a: DenseMatrix, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.n;
    assert_eq!(b.len(), n, "right-hand side length must match matrix dimension");
    for col in 0..n {
        let mut pivot = col;
        let mut best = abs(a.get(col, col));
        for row in col + 1..n {
            let v = abs(a.get(row, col));
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.data.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a.get(col, col);
        for row in col + 1..n {
            let factor = a.get(row, col) / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a.get(col, k);
                a.data[row * n + k] -= factor * v;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a.get(row, k) * x[k];
        }
        x[row] = acc / a.get(row, row);
    }
    Some(x)
}
