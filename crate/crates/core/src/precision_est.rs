//! Precision matrix estimation: covariance thresholding, inversion and a
//! row-wise refit on the thresholded support.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, HctError, Result};
use crate::linalg::EnvelopeCholesky;
use crate::matrix::SparseSymMatrix;
use crate::model::Dataset;

/// Default `η` grid for tuning and for escalation when `Σ*` is indefinite.
pub const DEFAULT_ETA_GRID: [f64; 12] = [
    0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.5,
];

/// Bytes needed to hold one dense `p × p` matrix of `f64`.
pub fn dense_bytes(p: usize) -> u64 {
    (p as u64) * (p as u64) * 8
}

/// `diag(1/Σ̂_jj)`: the precision estimate when features are treated as
/// independent. Only the diagonal of `Σ̂` is formed.
pub fn diagonal_precision(data: &Dataset) -> Result<SparseSymMatrix> {
    let labels = data.require_labels()?;
    let (n, p) = (data.n(), data.p());
    if n < 2 {
        return Err(HctError::Degenerate(format!(
            "covariance needs at least two samples, got {n}"
        )));
    }
    let mut sum = vec![0.0; p];
    let mut sq = vec![0.0; p];
    for (row, &y) in data.rows().zip(labels) {
        let y = f64::from(y);
        for ((s, q), x) in sum.iter_mut().zip(sq.iter_mut()).zip(row) {
            let v = y * x;
            *s += v;
            *q += v * v;
        }
    }
    let nf = n as f64;
    let mut diag = Vec::with_capacity(p);
    for (j, (s, q)) in sum.iter().zip(&sq).enumerate() {
        let m = s / nf;
        let var = q / nf - m * m;
        if !(var > 0.0) {
            return Err(HctError::Degenerate(format!("feature {j} has zero sample variance")));
        }
        diag.push(1.0 / var);
    }
    Ok(SparseSymMatrix::diagonal(diag))
}

/// `Σ̂ = (1/n) Σ_i (Y_i X_i - X̄)(Y_i X_i - X̄)ᵀ` with `X̄ = (1/n) Σ_i Y_i X_i`.
pub fn empirical_covariance(data: &Dataset) -> Result<DMatrix<f64>> {
    let labels = data.require_labels()?;
    let (n, p) = (data.n(), data.p());
    if n < 2 {
        return Err(HctError::Degenerate(format!(
            "covariance needs at least two samples, got {n}"
        )));
    }
    let mut w: Vec<f64> = Vec::with_capacity(n * p);
    for (row, &y) in data.rows().zip(labels) {
        let y = f64::from(y);
        w.extend(row.iter().map(|x| y * x));
    }
    let mut mean = vec![0.0; p];
    for row in w.chunks_exact(p) {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    for row in w.chunks_exact_mut(p) {
        for (x, m) in row.iter_mut().zip(&mean) {
            *x -= m;
        }
    }
    let mut sigma = DMatrix::<f64>::zeros(p, p);
    // C = (1/n) Wᵀ W with W row-major n × p and C column-major p × p
    unsafe {
        matrixmultiply::dgemm(
            p,
            n,
            p,
            1.0 / n as f64,
            w.as_ptr(),
            1,
            p as isize,
            w.as_ptr(),
            p as isize,
            1,
            0.0,
            sigma.as_mut_ptr(),
            1,
            p as isize,
        );
    }
    // enforce exact symmetry against rounding in the kernel
    for j in 0..p {
        for i in 0..j {
            let v = sigma[(i, j)];
            sigma[(j, i)] = v;
        }
    }
    Ok(sigma)
}

/// `Σ*(i, j) = Σ̂(i, j)·1{|Σ̂(i, j)| ≥ η}` off the diagonal; the diagonal is kept.
pub fn blt_threshold(sigma_hat: &DMatrix<f64>, eta: f64) -> SparseSymMatrix {
    SparseSymMatrix::from_dense_filtered(sigma_hat, |_, _, v| v.abs() >= eta)
}

/// Dense `(Σ*)⁻¹` through the envelope Cholesky factor.
pub fn invert_spd(sigma_star: &SparseSymMatrix) -> Result<DMatrix<f64>> {
    Ok(sigma_star.cholesky()?.inverse())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum ZetaMode {
    /// `S_i = {j : |Ω̂**(j, i)| ≥ ζ}`.
    Fixed(f64),
    /// `S_i` holds `i` plus the `k - 1` largest off-diagonal `|Ω̂**(j, i)|`.
    TargetRowNonzeros(usize),
}

#[derive(Debug, Clone)]
pub struct RefitOutput {
    pub omega: SparseSymMatrix,
    /// `max |ω_i(j) - ω_j(i)|` before symmetrisation.
    pub asymmetry: f64,
}

fn support(col: &[f64], i: usize, zeta: ZetaMode) -> Result<Vec<usize>> {
    match zeta {
        ZetaMode::Fixed(z) => {
            let s: Vec<usize> = (0..col.len()).filter(|&j| col[j].abs() >= z).collect();
            if s.binary_search(&i).is_err() {
                return Err(HctError::Config(format!(
                    "zeta = {z} removes the diagonal of row {i} (|value| = {})",
                    col[i].abs()
                )));
            }
            Ok(s)
        }
        ZetaMode::TargetRowNonzeros(k) => {
            if k == 0 {
                return Err(HctError::Config("target row nonzeros must be at least 1".into()));
            }
            let mut off: Vec<usize> = (0..col.len()).filter(|&j| j != i && col[j] != 0.0).collect();
            off.sort_by(|&a, &b| col[b].abs().total_cmp(&col[a].abs()).then(a.cmp(&b)));
            off.truncate(k - 1);
            off.push(i);
            off.sort_unstable();
            Ok(off)
        }
    }
}

/// Column `i` of the refit: `ω_i[S_i] = A_i⁻¹ e_i` with `A_i = Σ̂[S_i, S_i]`.
fn refit_column(omega_ss: &DMatrix<f64>, sigma_hat: &DMatrix<f64>, i: usize, zeta: ZetaMode) -> Result<Vec<(usize, f64)>> {
    let s = support(omega_ss.column(i).as_slice(), i, zeta)?;
    let k = s.len();
    let a = DMatrix::from_fn(k, k, |r, c| sigma_hat[(s[r], s[c])]);
    let chol = EnvelopeCholesky::factor_dense(&a).map_err(|e| HctError::Refit {
        row: i,
        reason: e.to_string(),
    })?;
    let pos = s.binary_search(&i).expect("support contains i");
    let mut rhs = vec![0.0; k];
    rhs[pos] = 1.0;
    chol.solve_in_place(&mut rhs);
    Ok(s.into_iter().zip(rhs).collect())
}

/// Refits every column on its thresholded support and symmetrises the result
/// as `(Ω̂ + Ω̂ᵀ)/2`.
pub fn refit(omega_ss: &DMatrix<f64>, sigma_hat: &DMatrix<f64>, zeta: ZetaMode) -> Result<RefitOutput> {
    let p = omega_ss.nrows();
    check_dim(p, sigma_hat.nrows())?;
    check_dim(p, omega_ss.ncols())?;
    let cols: Vec<Vec<(usize, f64)>> = (0..p)
        .into_par_iter()
        .map(|i| refit_column(omega_ss, sigma_hat, i, zeta))
        .collect::<Result<_>>()?;

    // (min, max) -> (value from column max, value from column min)
    let mut pairs: Vec<(usize, usize, f64, f64)> = Vec::new();
    let mut diag = vec![0.0; p];
    for (i, col) in cols.iter().enumerate() {
        for &(j, v) in col {
            if i == j {
                diag[i] = v;
            } else if j < i {
                pairs.push((j, i, v, 0.0));
            } else {
                pairs.push((i, j, 0.0, v));
            }
        }
    }
    pairs.sort_by_key(|e| (e.0, e.1));
    let mut entries: Vec<(usize, usize, f64)> = (0..p).map(|i| (i, i, diag[i])).collect();
    let mut asymmetry = 0.0_f64;
    let mut k = 0;
    while k < pairs.len() {
        let (i, j, mut a, mut b) = pairs[k];
        if k + 1 < pairs.len() && pairs[k + 1].0 == i && pairs[k + 1].1 == j {
            a += pairs[k + 1].2;
            b += pairs[k + 1].3;
            k += 1;
        }
        asymmetry = asymmetry.max((a - b).abs());
        entries.push((i, j, 0.5 * (a + b)));
        k += 1;
    }
    Ok(RefitOutput {
        omega: SparseSymMatrix::from_entries(p, entries)?,
        asymmetry,
    })
}

/// Entrywise diagnostics of an estimate against the truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptabilityReport {
    pub max_abs_error: f64,
    /// Largest row nonzero count of the estimate.
    pub row_sparsity: usize,
    pub symmetric: bool,
    /// `K²·√(ln p)/√n`.
    pub rate: f64,
    /// `C·rate` for the supplied constant.
    pub bound_rhs: f64,
    /// `max_abs_error / rate`.
    pub observed_constant: f64,
}

pub fn acceptability_report(
    omega_hat: &SparseSymMatrix,
    omega_true: &SparseSymMatrix,
    n: usize,
    k: usize,
    c: f64,
) -> Result<AcceptabilityReport> {
    let p = omega_true.dim();
    check_dim(p, omega_hat.dim())?;
    let symmetric = (0..p).all(|i| {
        omega_hat
            .off_diagonal_row(i)
            .iter()
            .all(|&(j, v)| omega_hat.get(j, i) == v)
    });
    let max_abs_error = omega_hat.max_abs_diff(omega_true);
    let rate = (k * k) as f64 * (p as f64).ln().sqrt() / (n as f64).sqrt();
    Ok(AcceptabilityReport {
        max_abs_error,
        row_sparsity: omega_hat.max_row_nnz(),
        symmetric,
        rate,
        bound_rhs: c * rate,
        observed_constant: max_abs_error / rate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EtaMode {
    Fixed { eta: f64 },
    /// Minimise `max |(Σ*)⁻¹ - Ω|` over the grid; needs the true `Ω`.
    OracleGrid { grid: Vec<f64> },
    /// Minimise `max |Σ̂_b (Σ*_a)⁻¹ - I|` where `a` and `b` are the two halves
    /// of each class.
    HeldOut { grid: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub eta: EtaMode,
    pub zeta: ZetaMode,
}

impl EstimationConfig {
    pub fn fixed(eta: f64, zeta: f64) -> Self {
        Self {
            eta: EtaMode::Fixed { eta },
            zeta: ZetaMode::Fixed(zeta),
        }
    }

    pub fn oracle(k: usize) -> Self {
        Self {
            eta: EtaMode::OracleGrid {
                grid: DEFAULT_ETA_GRID.to_vec(),
            },
            zeta: ZetaMode::TargetRowNonzeros(k),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let grid_ok = |g: &Vec<f64>| !g.is_empty() && g.iter().all(|&v| v >= 0.0);
        let ok = match &self.eta {
            EtaMode::Fixed { eta } => *eta >= 0.0,
            EtaMode::OracleGrid { grid } | EtaMode::HeldOut { grid } => grid_ok(grid),
        };
        if !ok {
            return Err(HctError::Config("eta must be ≥ 0 and grids nonempty".into()));
        }
        match self.zeta {
            ZetaMode::Fixed(z) if z < 0.0 => Err(HctError::Config("zeta must be ≥ 0".into())),
            ZetaMode::TargetRowNonzeros(0) => Err(HctError::Config("target k must be ≥ 1".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrecisionEstimate {
    pub omega: SparseSymMatrix,
    pub eta: f64,
    /// Ridge added to `Σ*` when no grid value gave a positive definite matrix.
    pub ridge: f64,
    pub asymmetry: f64,
}

/// `(Σ*)⁻¹` for the first `η` in `etas` (ascending from the requested value)
/// whose `Σ*` factors; falls back to a doubling ridge on the last one.
fn invert_with_escalation(sigma_hat: &DMatrix<f64>, etas: &[f64]) -> (f64, f64, DMatrix<f64>) {
    for &eta in etas {
        if let Ok(inv) = invert_spd(&blt_threshold(sigma_hat, eta)) {
            return (eta, 0.0, inv);
        }
    }
    let eta = *etas.last().expect("nonempty eta list");
    let base = blt_threshold(sigma_hat, eta);
    let mut ridge = 1e-6;
    loop {
        if let Ok(inv) = invert_spd(&base.with_ridge(ridge)) {
            return (eta, ridge, inv);
        }
        ridge *= 2.0;
    }
}

fn escalation_list(start: f64) -> Vec<f64> {
    std::iter::once(start)
        .chain(DEFAULT_ETA_GRID.iter().copied().filter(|&g| g > start))
        .collect()
}

fn max_abs_diff_dense(a: &DMatrix<f64>, b: &SparseSymMatrix) -> f64 {
    let p = a.nrows();
    let mut worst = 0.0_f64;
    for j in 0..p {
        let col = a.column(j);
        for i in 0..p {
            worst = worst.max((col[i] - b.get(i, j)).abs());
        }
    }
    worst
}

fn heldout_score(sigma_b: &DMatrix<f64>, inv_a: &DMatrix<f64>) -> f64 {
    let prod = sigma_b * inv_a;
    let p = prod.nrows();
    let mut worst = 0.0_f64;
    for j in 0..p {
        for i in 0..p {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - want).abs());
        }
    }
    worst
}

/// Full pipeline: `Σ̂ → Σ* → Ω̂** → refit`.
pub fn estimate_precision(
    data: &Dataset,
    config: &EstimationConfig,
    omega_true: Option<&SparseSymMatrix>,
) -> Result<PrecisionEstimate> {
    config.validate()?;
    let sigma_hat = empirical_covariance(data)?;
    let (eta, ridge, omega_ss) = match &config.eta {
        EtaMode::Fixed { eta } => invert_with_escalation(&sigma_hat, &escalation_list(*eta)),
        EtaMode::OracleGrid { grid } => {
            let truth = omega_true.ok_or_else(|| {
                HctError::Usage("oracle eta tuning needs the true precision matrix".into())
            })?;
            let mut best: Option<(f64, f64, DMatrix<f64>)> = None;
            for &eta in grid {
                if let Ok(inv) = invert_spd(&blt_threshold(&sigma_hat, eta)) {
                    let err = max_abs_diff_dense(&inv, truth);
                    if best.as_ref().is_none_or(|b| err < b.0) {
                        best = Some((err, eta, inv));
                    }
                }
            }
            match best {
                Some((_, eta, inv)) => (eta, 0.0, inv),
                None => invert_with_escalation(&sigma_hat, &sorted(grid)),
            }
        }
        EtaMode::HeldOut { grid } => {
            let (a, b) = split_halves(data)?;
            let sa = empirical_covariance(&a)?;
            let sb = empirical_covariance(&b)?;
            let mut best: Option<(f64, f64)> = None;
            for &eta in grid {
                if let Ok(inv) = invert_spd(&blt_threshold(&sa, eta)) {
                    let err = heldout_score(&sb, &inv);
                    if best.is_none_or(|b| err < b.0) {
                        best = Some((err, eta));
                    }
                }
            }
            let start = best.map_or_else(|| sorted(grid)[0], |b| b.1);
            let list: Vec<f64> = std::iter::once(start)
                .chain(sorted(grid).into_iter().filter(|&g| g > start))
                .collect();
            invert_with_escalation(&sigma_hat, &list)
        }
    };
    let out = refit(&omega_ss, &sigma_hat, config.zeta)?;
    Ok(PrecisionEstimate {
        omega: out.omega,
        eta,
        ridge,
        asymmetry: out.asymmetry,
    })
}

fn sorted(grid: &[f64]) -> Vec<f64> {
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g
}

/// Alternating samples within each class go to the two halves.
fn split_halves(data: &Dataset) -> Result<(Dataset, Dataset)> {
    let labels = data.require_labels()?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let mut seen = [0usize; 2];
    for (i, &y) in labels.iter().enumerate() {
        let c = usize::from(y > 0);
        if seen[c] % 2 == 0 {
            a.push(i);
        } else {
            b.push(i);
        }
        seen[c] += 1;
    }
    if a.len() < 2 || b.len() < 2 {
        return Err(HctError::Degenerate("too few samples for a held-out split".into()));
    }
    Ok((data.subset(&a), data.subset(&b)))
}

/// Writes `p` on the first line, then one `i j value` line per upper-triangle
/// entry. Values use the shortest representation that parses back exactly.
pub fn write_triplets<W: Write>(m: &SparseSymMatrix, mut w: W) -> Result<()> {
    writeln!(w, "{}", m.dim())?;
    for (i, j, v) in m.upper_entries() {
        writeln!(w, "{i} {j} {v:?}")?;
    }
    Ok(())
}

pub fn read_triplets<R: BufRead>(r: R) -> Result<SparseSymMatrix> {
    let mut lines = r.lines().enumerate();
    let p = match lines.next() {
        Some((_, l)) => {
            let l = l?;
            l.trim().parse::<usize>().map_err(|e| HctError::Parse {
                line: 1,
                message: format!("dimension {l:?}: {e}"),
            })?
        }
        None => return Err(HctError::Parse { line: 1, message: "empty file".into() }),
    };
    let mut entries = Vec::new();
    for (k, l) in lines {
        let l = l?;
        if l.trim().is_empty() {
            continue;
        }
        let bad = |m: String| HctError::Parse { line: k + 1, message: m };
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(bad(format!("expected `i j value`, got {l:?}")));
        }
        let i = f[0].parse::<usize>().map_err(|e| bad(e.to_string()))?;
        let j = f[1].parse::<usize>().map_err(|e| bad(e.to_string()))?;
        let v = f[2].parse::<f64>().map_err(|e| bad(e.to_string()))?;
        entries.push((i, j, v));
    }
    SparseSymMatrix::from_entries(p, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_omega, OmegaSpec};

    #[test]
    fn equal_samples_give_zero_covariance() {
        let d = Dataset::from_rows(&[vec![1.0, 2.0], vec![-1.0, -2.0]], Some(vec![1, -1])).unwrap();
        let s = empirical_covariance(&d).unwrap();
        assert!(s.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_point_covariance() {
        let d = Dataset::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]], Some(vec![1, -1])).unwrap();
        let s = empirical_covariance(&d).unwrap();
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn single_sample_is_degenerate() {
        let d = Dataset::from_rows(&[vec![1.0, 0.0]], Some(vec![1])).unwrap();
        assert!(matches!(empirical_covariance(&d), Err(HctError::Degenerate(_))));
    }

    #[test]
    fn covariance_matches_naive_sum() {
        let rows = vec![
            vec![0.3, -1.2, 2.0],
            vec![1.1, 0.4, -0.5],
            vec![-0.7, 0.9, 0.2],
            vec![0.5, 0.5, 1.5],
        ];
        let labels = vec![1, 1, -1, -1];
        let d = Dataset::from_rows(&rows, Some(labels.clone())).unwrap();
        let s = empirical_covariance(&d).unwrap();
        let w: Vec<Vec<f64>> = rows
            .iter()
            .zip(&labels)
            .map(|(r, &y)| r.iter().map(|x| f64::from(y) * x).collect())
            .collect();
        let mean: Vec<f64> = (0..3).map(|j| w.iter().map(|r| r[j]).sum::<f64>() / 4.0).collect();
        for i in 0..3 {
            for j in 0..3 {
                let naive = w.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / 4.0;
                assert!((s[(i, j)] - naive).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn threshold_extremes() {
        let s = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, -0.1, 0.3, 2.0, 0.05, -0.1, 0.05, 1.5]);
        assert_eq!(blt_threshold(&s, 0.0).to_dense(), s);
        let d = blt_threshold(&s, 0.31);
        assert_eq!(d.to_dense(), DMatrix::from_diagonal(&s.diagonal()));
        let mid = blt_threshold(&s, 0.1);
        assert_eq!(mid.get(0, 2), -0.1);
        assert_eq!(mid.get(1, 2), 0.0);
    }

    #[test]
    fn invert_two_by_two() {
        let s = SparseSymMatrix::from_entries(2, [(0, 0, 1.0 / 0.84), (1, 1, 1.0 / 0.84), (0, 1, -0.4 / 0.84)]).unwrap();
        let inv = invert_spd(&s).unwrap();
        assert!((inv[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((inv[(0, 1)] - 0.4).abs() < 1e-12);
        let d = invert_spd(&SparseSymMatrix::diagonal(vec![2.0, 4.0])).unwrap();
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.25]));
        assert!((d - want).abs().max() < 1e-15);
    }

    #[test]
    fn identity_refit_is_identity() {
        let eye = DMatrix::<f64>::identity(4, 4);
        let out = refit(&eye, &eye, ZetaMode::Fixed(0.5)).unwrap();
        assert!(out.omega.is_identity());
        assert_eq!(out.asymmetry, 0.0);
    }

    #[test]
    fn zeta_removing_diagonal_is_config_error() {
        let eye = DMatrix::<f64>::identity(2, 2);
        assert!(matches!(refit(&eye, &eye, ZetaMode::Fixed(1.5)), Err(HctError::Config(_))));
    }

    #[test]
    fn exact_sigma_round_trip() {
        let omega = build_omega(&OmegaSpec::Tridiagonal { a: 0.4 }, 5).unwrap();
        let sigma = omega.cholesky().unwrap().inverse();
        let out = refit(&omega.to_dense(), &sigma, ZetaMode::Fixed(0.2)).unwrap();
        assert!(out.omega.max_abs_diff(&omega) < 1e-8);
        assert!(out.asymmetry < 1e-6);
    }

    #[test]
    fn zero_zeta_gives_full_inverse() {
        let s = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0]);
        let inv = s.clone().try_inverse().unwrap();
        let out = refit(&inv, &s, ZetaMode::Fixed(0.0)).unwrap();
        assert!((out.omega.to_dense() - inv).abs().max() < 1e-8);
    }

    #[test]
    fn row_target_keeps_k_entries() {
        let omega = build_omega(&OmegaSpec::FiveDiagonal { a1: 0.4, a2: 0.15 }, 12).unwrap();
        let sigma = omega.cholesky().unwrap().inverse();
        let inv = sigma.clone().try_inverse().unwrap();
        let out = refit(&inv, &sigma, ZetaMode::TargetRowNonzeros(5)).unwrap();
        assert!(out.omega.max_abs_diff(&omega) < 1e-8);
    }

    #[test]
    fn acceptability_of_perturbed_matrix() {
        let omega = build_omega(&OmegaSpec::Tridiagonal { a: 0.3 }, 6).unwrap();
        let report = acceptability_report(&omega, &omega, 100, 3, 1.0).unwrap();
        assert_eq!(report.max_abs_error, 0.0);
        let mut e: Vec<_> = omega.upper_entries().collect();
        e.push((0, 3, 0.01));
        let bumped = SparseSymMatrix::from_entries(6, e).unwrap();
        let report = acceptability_report(&bumped, &omega, 100, 3, 1.0).unwrap();
        assert_eq!(report.max_abs_error, 0.01);
        assert!(report.symmetric);
        assert_eq!(report.row_sparsity, 4);
    }

    #[test]
    fn triplets_round_trip_bit_exact() {
        let m = SparseSymMatrix::from_entries(3, [(0, 0, 1.0 / 3.0), (1, 1, 0.1 + 0.2), (2, 2, 1e-300), (0, 2, -2.0 / 7.0)]).unwrap();
        let mut buf = Vec::new();
        write_triplets(&m, &mut buf).unwrap();
        let back = read_triplets(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }
}
