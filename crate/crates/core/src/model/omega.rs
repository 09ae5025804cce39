use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HctError, Result};
use crate::matrix::SparseSymMatrix;

/// Structured precision matrices with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OmegaSpec {
    Identity,
    /// `1` on the diagonal, `a` on the first off-diagonal.
    Tridiagonal { a: f64 },
    /// `1` on the diagonal, `a1` and `a2` on the first and second off-diagonals.
    FiveDiagonal { a1: f64, a2: f64 },
    /// Disjoint 2×2 blocks `[[1, h], [h, 1]]` pairing nodes `(0,1), (2,3), …`.
    PairedBlock { h: f64 },
    /// `num_blocks` copies of a `block_size` five-diagonal matrix.
    BlockFiveDiagonal {
        num_blocks: usize,
        block_size: usize,
        a1: f64,
        a2: f64,
    },
    /// Off-diagonal entries `(i, j, value)`; the diagonal is fixed at one.
    Explicit { entries: Vec<(usize, usize, f64)> },
}

impl fmt::Display for OmegaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaSpec::Identity => write!(f, "identity"),
            OmegaSpec::Tridiagonal { a } => write!(f, "tridiagonal(a={a})"),
            OmegaSpec::FiveDiagonal { a1, a2 } => write!(f, "five-diagonal(a1={a1}, a2={a2})"),
            OmegaSpec::PairedBlock { h } => write!(f, "paired-block(h={h})"),
            OmegaSpec::BlockFiveDiagonal {
                num_blocks,
                block_size,
                a1,
                a2,
            } => write!(
                f,
                "block-five-diagonal({num_blocks}x{block_size}, a1={a1}, a2={a2})"
            ),
            OmegaSpec::Explicit { entries } => write!(f, "explicit({} entries)", entries.len()),
        }
    }
}

impl OmegaSpec {
    pub fn is_identity(&self) -> bool {
        matches!(self, OmegaSpec::Identity)
    }

    /// Off-diagonal entries with `i < j` for dimension `p`.
    fn off_diagonal(&self, p: usize) -> Result<Vec<(usize, usize, f64)>> {
        let band = |a1: f64, a2: f64, lo: usize, hi: usize| {
            let mut e = Vec::new();
            for i in lo..hi {
                if i + 1 < hi {
                    e.push((i, i + 1, a1));
                }
                if i + 2 < hi {
                    e.push((i, i + 2, a2));
                }
            }
            e
        };
        Ok(match self {
            OmegaSpec::Identity => Vec::new(),
            OmegaSpec::Tridiagonal { a } => band(*a, 0.0, 0, p),
            OmegaSpec::FiveDiagonal { a1, a2 } => band(*a1, *a2, 0, p),
            OmegaSpec::PairedBlock { h } => (0..p / 2).map(|b| (2 * b, 2 * b + 1, *h)).collect(),
            OmegaSpec::BlockFiveDiagonal {
                num_blocks,
                block_size,
                a1,
                a2,
            } => {
                if num_blocks * block_size != p {
                    return Err(HctError::Config(format!(
                        "{num_blocks} blocks of size {block_size} do not cover p = {p}"
                    )));
                }
                (0..*num_blocks)
                    .flat_map(|b| band(*a1, *a2, b * block_size, (b + 1) * block_size))
                    .collect()
            }
            OmegaSpec::Explicit { entries } => entries
                .iter()
                .filter(|e| e.0 != e.1)
                .map(|&(i, j, v)| (i.min(j), i.max(j), v))
                .collect(),
        })
    }
}

/// Parses `identity`, `tridiagonal:A`, `five_diagonal:A1,A2`,
/// `paired_block:H` or `block_five_diagonal:BLOCKS,SIZE,A1,A2`.
impl FromStr for OmegaSpec {
    type Err = HctError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| HctError::Config(format!("bad number `{a}` in `{s}`")))
                })
                .collect::<Result<_>>()?
        };
        let want = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(HctError::Config(format!("`{kind}` takes {k} value(s), got `{s}`")))
            }
        };
        let count = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(HctError::Config(format!("expected a positive integer in `{s}`")))
            }
        };
        match kind.trim().replace('-', "_").as_str() {
            "identity" => want(0).map(|_| OmegaSpec::Identity),
            "tridiagonal" => want(1).map(|_| OmegaSpec::Tridiagonal { a: nums[0] }),
            "five_diagonal" => want(2).map(|_| OmegaSpec::FiveDiagonal { a1: nums[0], a2: nums[1] }),
            "paired_block" => want(1).map(|_| OmegaSpec::PairedBlock { h: nums[0] }),
            "block_five_diagonal" => {
                want(4)?;
                Ok(OmegaSpec::BlockFiveDiagonal {
                    num_blocks: count(nums[0])?,
                    block_size: count(nums[1])?,
                    a1: nums[2],
                    a2: nums[3],
                })
            }
            other => Err(HctError::Config(format!("unknown precision structure `{other}`"))),
        }
    }
}

/// Builds the unit-diagonal precision matrix for `spec` and certifies it is
/// positive definite by factoring it.
pub fn build_omega(spec: &OmegaSpec, p: usize) -> Result<SparseSymMatrix> {
    let wrap = |e: HctError| HctError::OmegaConstruction {
        spec: spec.to_string(),
        source: Box::new(e),
    };
    let off = spec.off_diagonal(p).map_err(wrap)?;
    if off.iter().any(|e| !e.2.is_finite()) {
        return Err(wrap(HctError::Config("non-finite off-diagonal entry".into())));
    }
    let entries = (0..p).map(|i| (i, i, 1.0)).chain(off);
    let omega = SparseSymMatrix::from_entries(p, entries).map_err(wrap)?;
    omega.cholesky().map_err(wrap)?;
    Ok(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_first_row() {
        let m = build_omega(&OmegaSpec::Tridiagonal { a: 0.45 }, 4).unwrap();
        assert_eq!(m.diag()[0], 1.0);
        assert_eq!(m.off_diagonal_row(0), &[(1, 0.45)]);
        assert_eq!(m.max_row_nnz(), 3);
    }

    #[test]
    fn paired_block_structure() {
        let m = build_omega(&OmegaSpec::PairedBlock { h: 0.6 }, 4).unwrap();
        assert_eq!(m.get(0, 1), 0.6);
        assert_eq!(m.get(2, 3), 0.6);
        assert_eq!(m.get(1, 2), 0.0);
        assert_eq!(m.max_row_nnz(), 2);
    }

    #[test]
    fn five_diagonal_sparsity() {
        let m = build_omega(&OmegaSpec::FiveDiagonal { a1: 0.45, a2: 0.2 }, 10).unwrap();
        assert_eq!(m.max_row_nnz(), 5);
        assert_eq!(m.row_nnz(0), 3);
    }

    #[test]
    fn identity_is_one_sparse() {
        let m = build_omega(&OmegaSpec::Identity, 7).unwrap();
        assert_eq!(m.max_row_nnz(), 1);
        let l = m.cholesky().unwrap();
        assert_eq!(l.envelope_size(), 7);
    }

    #[test]
    fn tridiagonal_definiteness_boundary() {
        // smallest eigenvalue is 1 - 2a·cos(π/(p+1)); at p = 10 the boundary
        // is a = 1 / (2 cos(π/11)) ≈ 0.5211
        let boundary = 1.0 / (2.0 * (std::f64::consts::PI / 11.0).cos());
        assert!(build_omega(&OmegaSpec::Tridiagonal { a: 0.49 }, 10).is_ok());
        assert!(build_omega(&OmegaSpec::Tridiagonal { a: 0.51 }, 10).is_ok());
        assert!(build_omega(&OmegaSpec::Tridiagonal { a: boundary - 1e-6 }, 10).is_ok());
        let err = build_omega(&OmegaSpec::Tridiagonal { a: boundary + 1e-6 }, 10).unwrap_err();
        assert!(err.to_string().contains("tridiagonal"));
    }

    #[test]
    fn parse_specs() {
        assert_eq!("identity".parse::<OmegaSpec>().unwrap(), OmegaSpec::Identity);
        assert_eq!("tridiagonal:0.45".parse::<OmegaSpec>().unwrap(), OmegaSpec::Tridiagonal { a: 0.45 });
        assert_eq!(
            "five-diagonal:0.45,0.2".parse::<OmegaSpec>().unwrap(),
            OmegaSpec::FiveDiagonal { a1: 0.45, a2: 0.2 }
        );
        assert_eq!(
            "block_five_diagonal:10,500,0.45,0.1".parse::<OmegaSpec>().unwrap(),
            OmegaSpec::BlockFiveDiagonal { num_blocks: 10, block_size: 500, a1: 0.45, a2: 0.1 }
        );
        assert!("tridiagonal".parse::<OmegaSpec>().is_err());
        assert!("block_five_diagonal:2.5,4,0.1,0.1".parse::<OmegaSpec>().is_err());
        assert!("banded:0.1".parse::<OmegaSpec>().is_err());
    }

    #[test]
    fn block_sizes_must_cover_p() {
        let spec = OmegaSpec::BlockFiveDiagonal {
            num_blocks: 3,
            block_size: 4,
            a1: 0.3,
            a2: 0.1,
        };
        assert!(build_omega(&spec, 12).is_ok());
        assert!(build_omega(&spec, 13).is_err());
        let m = build_omega(&spec, 12).unwrap();
        assert_eq!(m.get(3, 4), 0.0);
        assert_eq!(m.get(4, 5), 0.3);
    }
}
