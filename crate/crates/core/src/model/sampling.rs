use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, HctError, Result};
use crate::linalg::EnvelopeCholesky;
use crate::matrix::SparseSymMatrix;

/// Draws `N(0, Ω⁻¹)` vectors as `L⁻ᵀξ` from the Cholesky factor `Ω = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    chol: EnvelopeCholesky,
}

impl NoiseSampler {
    pub fn new(omega: &SparseSymMatrix) -> Result<Self> {
        Ok(Self {
            chol: omega.cholesky()?,
        })
    }

    pub fn dim(&self) -> usize {
        self.chol.dim()
    }

    pub fn factor(&self) -> &EnvelopeCholesky {
        &self.chol
    }

    /// Overwrites `out` with one draw.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        self.chol.solve_upper_in_place(out);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelScheme {
    /// `Y_i = +1` for `i ≤ n/2` and `-1` after (training protocol).
    Balanced,
    /// Independent fair signs (test protocol).
    Random,
    /// No labels; every sample is centred at `+μ`.
    Unlabeled,
}

/// `n` samples of length `p`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    p: usize,
    samples: Vec<f64>,
    labels: Option<Vec<i8>>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(p: usize, samples: Vec<f64>, labels: Option<Vec<i8>>) -> Result<Self> {
        if p == 0 || !samples.len().is_multiple_of(p) {
            return Err(HctError::Config(format!(
                "{} values do not form rows of length {p}",
                samples.len()
            )));
        }
        let n = samples.len() / p;
        if let Some(l) = &labels {
            check_dim(n, l.len())?;
            if l.iter().any(|&y| y != 1 && y != -1) {
                return Err(HctError::Config("labels must be +1 or -1".into()));
            }
        }
        Ok(Self {
            p,
            samples,
            labels,
            provenance: String::new(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Option<Vec<i8>>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(HctError::Config("rows have different lengths".into()));
        }
        Self::new(p, rows.concat(), labels)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.samples.len() / self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.samples[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.p)
    }

    /// Row-major `n × p` sample matrix.
    pub fn as_slice(&self) -> &[f64] {
        &self.samples
    }

    pub fn labels(&self) -> Option<&[i8]> {
        self.labels.as_deref()
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    pub fn require_labels(&self) -> Result<&[i8]> {
        self.labels
            .as_deref()
            .ok_or_else(|| HctError::Usage("dataset has no labels".into()))
    }

    /// Samples at `idx` in the given order.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        let mut samples = Vec::with_capacity(idx.len() * self.p);
        for &i in idx {
            samples.extend_from_slice(self.row(i));
        }
        Dataset {
            p: self.p,
            samples,
            labels: self.labels.as_ref().map(|l| idx.iter().map(|&i| l[i]).collect()),
            provenance: self.provenance.clone(),
        }
    }

    /// CSV with header `label,x0,…`; the label column is omitted when absent.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = Vec::with_capacity(self.p + 1);
        if self.labels.is_some() {
            header.push("label".into());
        }
        header.extend((0..self.p).map(|j| format!("x{j}")));
        out.write_record(&header)?;
        let mut rec: Vec<String> = Vec::with_capacity(self.p + 1);
        for (i, row) in self.rows().enumerate() {
            rec.clear();
            if let Some(l) = &self.labels {
                rec.push(l[i].to_string());
            }
            // `{}` on f64 prints the shortest string that round-trips
            rec.extend(row.iter().map(|v| format!("{v}")));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        let labeled = header.get(0).is_some_and(|h| h.trim() == "label");
        let p = header.len() - usize::from(labeled);
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = k + 2;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| HctError::Parse {
                    line,
                    message: format!("{s:?}: {e}"),
                })
            };
            let mut it = rec.iter();
            if labeled {
                let y = parse(it.next().unwrap_or(""))?;
                labels.push(match y {
                    1.0 => 1,
                    -1.0 => -1,
                    _ => {
                        return Err(HctError::Parse {
                            line,
                            message: format!("label {y} is not ±1"),
                        })
                    }
                });
            }
            for s in it {
                samples.push(parse(s)?);
            }
        }
        Self::new(p, samples, labeled.then_some(labels))
    }
}

/// Draws `n` samples `X_i = Y_i·μ + L⁻ᵀξ_i`.
pub fn sample_dataset<R: Rng + ?Sized>(
    mu: &[f64],
    noise: &NoiseSampler,
    n: usize,
    scheme: LabelScheme,
    rng: &mut R,
) -> Result<Dataset> {
    let p = mu.len();
    check_dim(noise.dim(), p)?;
    let labels: Option<Vec<i8>> = match scheme {
        LabelScheme::Balanced => Some((0..n).map(|i| if 2 * (i + 1) <= n { 1 } else { -1 }).collect()),
        LabelScheme::Random => Some((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()),
        LabelScheme::Unlabeled => None,
    };
    let mut samples = vec![0.0; n * p];
    for (i, row) in samples.chunks_exact_mut(p).enumerate() {
        noise.fill(rng, row);
        let y = labels.as_ref().map_or(1.0, |l| f64::from(l[i]));
        for (x, m) in row.iter_mut().zip(mu) {
            *x += y * m;
        }
    }
    Dataset::new(p, samples, labels)
}

/// `z = (1/√n)·Σ_i Y_i X_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZVector {
    pub z: Vec<f64>,
    pub n: usize,
}

pub fn z_vector(data: &Dataset) -> Result<ZVector> {
    let labels = data.require_labels()?;
    let mut z = vec![0.0; data.p()];
    for (row, &y) in data.rows().zip(labels) {
        let y = f64::from(y);
        for (a, x) in z.iter_mut().zip(row) {
            *a += y * x;
        }
    }
    let n = data.n();
    let s = 1.0 / (n as f64).sqrt();
    z.iter_mut().for_each(|v| *v *= s);
    Ok(ZVector { z, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::omega::{build_omega, OmegaSpec};
    use crate::rng::substream;

    #[test]
    fn z_of_single_positive_sample_is_the_sample() {
        let d = Dataset::from_rows(&[vec![1.5, -2.0, 0.25]], Some(vec![1])).unwrap();
        assert_eq!(z_vector(&d).unwrap().z, vec![1.5, -2.0, 0.25]);
    }

    #[test]
    fn z_of_aligned_samples_is_twice_v() {
        let v = [0.5, -1.0];
        let labels = vec![1, 1, -1, -1];
        let rows: Vec<Vec<f64>> = labels.iter().map(|&y| v.iter().map(|x| f64::from(y) * x).collect()).collect();
        let d = Dataset::from_rows(&rows, Some(labels)).unwrap();
        assert_eq!(z_vector(&d).unwrap().z, vec![1.0, -2.0]);
    }

    #[test]
    fn unlabeled_z_is_usage_error() {
        let d = Dataset::from_rows(&[vec![1.0]], None).unwrap();
        assert!(matches!(z_vector(&d), Err(HctError::Usage(_))));
    }

    #[test]
    fn balanced_labels_split_in_half() {
        let omega = SparseSymMatrix::identity(2);
        let s = NoiseSampler::new(&omega).unwrap();
        let d = sample_dataset(&[0.0, 0.0], &s, 5, LabelScheme::Balanced, &mut substream(0, 0)).unwrap();
        assert_eq!(d.labels().unwrap(), &[1, 1, -1, -1, -1]);
    }

    #[test]
    fn seeded_sampling_is_bit_identical() {
        let omega = build_omega(&OmegaSpec::Tridiagonal { a: 0.3 }, 20).unwrap();
        let s = NoiseSampler::new(&omega).unwrap();
        let mu = vec![0.1; 20];
        let a = sample_dataset(&mu, &s, 30, LabelScheme::Random, &mut substream(5, 1)).unwrap();
        let b = sample_dataset(&mu, &s, 30, LabelScheme::Random, &mut substream(5, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn two_by_two_covariance_matches_inverse() {
        // Ω = [[1, .4], [.4, 1]] so Σ = [[1, -.4], [-.4, 1]] / 0.84
        let omega = build_omega(&OmegaSpec::Tridiagonal { a: 0.4 }, 2).unwrap();
        let s = NoiseSampler::new(&omega).unwrap();
        let d = sample_dataset(&[0.0, 0.0], &s, 100_000, LabelScheme::Unlabeled, &mut substream(11, 0)).unwrap();
        let mut c = [0.0; 3];
        for r in d.rows() {
            c[0] += r[0] * r[0];
            c[1] += r[0] * r[1];
            c[2] += r[1] * r[1];
        }
        let n = d.n() as f64;
        assert!((c[0] / n - 1.0 / 0.84).abs() < 0.02);
        assert!((c[1] / n + 0.4 / 0.84).abs() < 0.02);
        assert!((c[2] / n - 1.0 / 0.84).abs() < 0.02);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let omega = SparseSymMatrix::identity(3);
        let s = NoiseSampler::new(&omega).unwrap();
        let d = sample_dataset(&[0.2, 0.0, -0.1], &s, 7, LabelScheme::Random, &mut substream(2, 0)).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = Dataset::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.as_slice(), d.as_slice());
        assert_eq!(back.labels(), d.labels());
    }
}
