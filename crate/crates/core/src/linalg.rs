//! Envelope (skyline) Cholesky factorisation and dense helpers.
//!
//! Row `i` of the factor is stored densely from its first structural nonzero
//! up to the diagonal. Banded matrices cost `O(p·b²)` to factor and `O(p·b)`
//! per solve; a dense matrix degrades gracefully to the textbook algorithm.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{HctError, Result};
use crate::matrix::SparseSymMatrix;

#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &SparseSymMatrix) -> Result<Self> {
        let first = a.lower_envelope();
        Self::factor_with(first, |i, f, row| {
            row.iter_mut().for_each(|v| *v = 0.0);
            for &(j, v) in a.off_diagonal_row(i) {
                if j >= i {
                    break;
                }
                row[j - f] = v;
            }
            row[i - f] = a.diag()[i];
        })
    }

    /// Factors a dense symmetric matrix, reading only its lower triangle.
    /// Exact zeros at the start of a row are skipped.
    pub fn factor_dense(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let first = (0..n)
            .map(|i| (0..i).find(|&j| a[(i, j)] != 0.0).unwrap_or(i))
            .collect();
        Self::factor_with(first, |i, f, row| {
            for (k, v) in row.iter_mut().enumerate() {
                *v = a[(i, f + k)];
            }
        })
    }

    fn factor_with<F>(first: Vec<usize>, mut fill: F) -> Result<Self>
    where
        F: FnMut(usize, usize, &mut [f64]),
    {
        let n = first.len();
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for (i, &f) in first.iter().enumerate() {
            start.push(total);
            total += i - f + 1;
        }
        start.push(total);
        let mut values = vec![0.0; total];

        for i in 0..n {
            let fi = first[i];
            let (done, rest) = values.split_at_mut(start[i]);
            let row = &mut rest[..i - fi + 1];
            fill(i, fi, row);
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let row_j = &done[start[j]..start[j + 1]];
                let dot = dot(&row[lo - fi..j - fi], &row_j[lo - fj..j - fj]);
                let ljj = row_j[j - fj];
                row[j - fi] = (row[j - fi] - dot) / ljj;
            }
            let off = &row[..i - fi];
            let pivot = row[i - fi] - dot(off, off);
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(HctError::NotPositiveDefinite { row: i, pivot });
            }
            row[i - fi] = pivot.sqrt();
        }
        Ok(Self {
            first,
            start,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[self.start[i]..self.start[i + 1]]
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.values[self.start[i + 1] - 1]
    }

    /// Smallest squared pivot `L(i, i)²`.
    pub fn min_pivot(&self) -> f64 {
        (0..self.dim()).map(|i| self.diag(i).powi(2)).fold(f64::INFINITY, f64::min)
    }

    /// Solves `L y = b` in place, assuming `b[..from]` is zero.
    fn forward_from(&self, b: &mut [f64], from: usize) {
        for r in from..self.dim() {
            let f = self.first[r];
            let lo = f.max(from);
            let row = self.row(r);
            let s = dot(&row[lo - f..r - f], &b[lo..r]);
            b[r] = (b[r] - s) / row[r - f];
        }
    }

    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.dim());
        let from = b.iter().position(|&v| v != 0.0).unwrap_or(b.len());
        self.forward_from(b, from);
    }

    /// Solves `Lᵀ x = b` in place.
    pub fn solve_upper_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.dim());
        for r in (0..self.dim()).rev() {
            let f = self.first[r];
            let row = self.row(r);
            let xr = b[r] / row[r - f];
            b[r] = xr;
            if xr != 0.0 {
                for (bk, l) in b[f..r].iter_mut().zip(&row[..r - f]) {
                    *bk -= l * xr;
                }
            }
        }
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.solve_lower_in_place(b);
        self.solve_upper_in_place(b);
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// `L x`.
    pub fn mul_lower(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        (0..self.dim())
            .map(|r| {
                let f = self.first[r];
                dot(self.row(r), &x[f..=r])
            })
            .collect()
    }

    /// Dense `A⁻¹`, one column per solve, columns computed in parallel.
    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut inv = DMatrix::zeros(n, n);
        inv.as_mut_slice()
            .par_chunks_mut(n.max(1))
            .enumerate()
            .for_each(|(c, col)| {
                col[c] = 1.0;
                self.forward_from(col, c);
                self.solve_upper_in_place(col);
            });
        inv
    }

    /// Diagonal of `A⁻¹`.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .into_par_iter()
            .map(|c| {
                let mut col = vec![0.0; n];
                col[c] = 1.0;
                self.forward_from(&mut col, c);
                // A⁻¹(c, c) = ‖L⁻¹ e_c‖²
                col[c..].iter().map(|v| v * v).sum()
            })
            .collect()
    }
}

/// Four-accumulator dot product; the fixed association order keeps results
/// bit-identical run to run.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..n {
        s += a[i] * b[i];
    }
    s
}

/// Symmetric square root `A^{1/2}` of a dense symmetric matrix.
/// Eigenvalues below `-1e-10·max|λ|` are rejected; tiny negatives clamp to 0.
pub fn symmetric_sqrt(a: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = a.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut vals = eig.eigenvalues.clone();
    for (k, v) in vals.iter_mut().enumerate() {
        if *v < -1e-10 * scale.max(1.0) {
            return Err(HctError::NotPositiveDefinite { row: k, pivot: *v });
        }
        *v = v.max(0.0).sqrt();
    }
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&vals) * q.transpose())
}

/// Power-iteration estimate of `‖A⁻¹‖₂` for a positive definite `A`.
pub fn inverse_spectral_norm(chol: &EnvelopeCholesky, iters: usize) -> f64 {
    let n = chol.dim();
    if n == 0 {
        return 0.0;
    }
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 1e-3).collect();
    let mut lambda = 0.0;
    for _ in 0..iters.max(1) {
        let norm = dot(&x, &x).sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        let y = chol.solve(&x);
        lambda = dot(&x, &y);
        x = y;
    }
    lambda
}
