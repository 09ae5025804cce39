//! Symmetric matrices with sparse row storage.

use nalgebra::DMatrix;

use crate::error::{check_dim, HctError, Result};
use crate::linalg::EnvelopeCholesky;

/// A symmetric `p × p` matrix stored as a dense diagonal plus sorted
/// off-diagonal row lists.
///
/// Both triangles are stored, so `(i, j)` is present exactly when `(j, i)` is,
/// with the same value. Off-diagonal entries equal to `0.0` are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    diag: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSymMatrix {
    pub fn identity(p: usize) -> Self {
        Self {
            diag: vec![1.0; p],
            rows: vec![Vec::new(); p],
        }
    }

    pub fn diagonal(diag: Vec<f64>) -> Self {
        let p = diag.len();
        Self {
            diag,
            rows: vec![Vec::new(); p],
        }
    }

    /// Builds from `(i, j, value)` entries. An off-diagonal pair may be given
    /// as `(i, j)`, `(j, i)` or both, but both must then carry the same value.
    pub fn from_entries<I>(p: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut diag = vec![0.0; p];
        let mut upper: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in entries {
            if i >= p || j >= p {
                return Err(HctError::Config(format!(
                    "entry ({i}, {j}) outside a {p}x{p} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(HctError::Config(format!("entry ({i}, {j}) is not finite")));
            }
            if i == j {
                diag[i] = v;
            } else {
                upper.push((i.min(j), i.max(j), v));
            }
        }
        upper.sort_by_key(|e| (e.0, e.1));
        let mut rows = vec![Vec::new(); p];
        let mut k = 0;
        while k < upper.len() {
            let (i, j, v) = upper[k];
            let mut m = k + 1;
            while m < upper.len() && upper[m].0 == i && upper[m].1 == j {
                if upper[m].2 != v {
                    return Err(HctError::Config(format!(
                        "conflicting values for entry ({i}, {j}): {v} vs {}",
                        upper[m].2
                    )));
                }
                m += 1;
            }
            if v != 0.0 {
                rows[i].push((j, v));
                rows[j].push((i, v));
            }
            k = m;
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
        }
        Ok(Self { diag, rows })
    }

    /// Keeps the diagonal of a dense symmetric matrix plus every off-diagonal
    /// entry accepted by `keep(i, j, value)`. Only the upper triangle is read.
    pub fn from_dense_filtered<F>(dense: &DMatrix<f64>, mut keep: F) -> Self
    where
        F: FnMut(usize, usize, f64) -> bool,
    {
        let p = dense.nrows();
        let diag = (0..p).map(|i| dense[(i, i)]).collect();
        let mut rows = vec![Vec::new(); p];
        for j in 0..p {
            for i in 0..j {
                let v = dense[(i, j)];
                if v != 0.0 && keep(i, j, v) {
                    rows[i].push((j, v));
                    rows[j].push((i, v));
                }
            }
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
        }
        Self { diag, rows }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal entries of row `i`, sorted by column.
    pub fn off_diagonal_row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => 0.0,
        }
    }

    /// Number of nonzeros in row `i`, diagonal included.
    pub fn row_nnz(&self, i: usize) -> usize {
        self.rows[i].len() + usize::from(self.diag[i] != 0.0)
    }

    /// `K`: the largest row nonzero count.
    pub fn max_row_nnz(&self) -> usize {
        (0..self.dim()).map(|i| self.row_nnz(i)).max().unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        (0..self.dim()).map(|i| self.row_nnz(i)).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.diag.iter().all(|&d| d == 1.0) && self.rows.iter().all(Vec::is_empty)
    }

    /// Largest `|A(i, j)|` over `i ≠ j`.
    pub fn max_abs_off_diagonal(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().map(|e| e.1.abs()))
            .fold(0.0, f64::max)
    }

    /// Entries `(i, j, value)` with `i ≤ j`, row by row.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim()).flat_map(move |i| {
            std::iter::once((i, i, self.diag[i])).chain(
                self.rows[i]
                    .iter()
                    .filter(move |e| e.0 > i)
                    .map(move |&(j, v)| (i, j, v)),
            )
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "matvec dimension mismatch");
        self.rows
            .iter()
            .zip(&self.diag)
            .enumerate()
            .map(|(i, (row, d))| {
                row.iter().fold(d * x[i], |acc, &(j, v)| acc + v * x[j])
            })
            .collect()
    }

    pub fn checked_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.matvec(x))
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.matvec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let p = self.dim();
        let mut m = DMatrix::zeros(p, p);
        for i in 0..p {
            m[(i, i)] = self.diag[i];
            for &(j, v) in &self.rows[i] {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `max |A(i, j) - B(i, j)|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff dimension mismatch");
        let mut worst = 0.0_f64;
        for i in 0..self.dim() {
            worst = worst.max((self.diag[i] - other.diag[i]).abs());
            let (a, b) = (&self.rows[i], &other.rows[i]);
            let (mut ka, mut kb) = (0, 0);
            while ka < a.len() || kb < b.len() {
                let ja = a.get(ka).map_or(usize::MAX, |e| e.0);
                let jb = b.get(kb).map_or(usize::MAX, |e| e.0);
                let d = if ja == jb {
                    ka += 1;
                    kb += 1;
                    a[ka - 1].1 - b[kb - 1].1
                } else if ja < jb {
                    ka += 1;
                    a[ka - 1].1
                } else {
                    kb += 1;
                    b[kb - 1].1
                };
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// Column index of the first nonzero on or below the diagonal of each row.
    pub(crate) fn lower_envelope(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| row.first().map_or(i, |e| e.0.min(i)))
            .collect()
    }

    /// Cholesky factor `A = L Lᵀ`; fails when `A` is not positive definite.
    pub fn cholesky(&self) -> Result<EnvelopeCholesky> {
        EnvelopeCholesky::factor(self)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_ok()
    }

    /// Returns `A + δ I`.
    pub fn with_ridge(&self, delta: f64) -> Self {
        let mut out = self.clone();
        for d in &mut out.diag {
            *d += delta;
        }
        out
    }
}
