#![allow(dead_code)]

use std::path::PathBuf;

use sparse_hct::theory::{delta, psi_bar, rho, rho_star, t_star, w0_tilde};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn read_csv(name: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(data_path(name)).expect("oracle file present");
    r.records()
        .map(|rec| rec.expect("well-formed row").iter().map(str::to_owned).collect())
        .collect()
}

/// One row of `theory_oracle.csv` evaluated by the crate.
pub struct OracleCheck {
    pub func: String,
    pub args: [f64; 3],
    pub expected: f64,
    pub got: f64,
}

impl OracleCheck {
    pub fn error(&self) -> f64 {
        (self.got - self.expected).abs() / self.expected.abs().max(1.0)
    }
}

pub fn theory_oracle() -> Vec<OracleCheck> {
    read_csv("theory_oracle.csv")
        .into_iter()
        .map(|row| {
            let a: f64 = row[1].parse().unwrap();
            let b: f64 = row[2].parse().unwrap();
            let c: f64 = row[3].parse().unwrap();
            let got = match row[0].as_str() {
                "rho" => rho(a).unwrap(),
                "rho_star" => rho_star(a, b).unwrap(),
                "delta" => delta(a, b).unwrap(),
                "t_star" => t_star(a, b, c).unwrap(),
                "psi_bar" => psi_bar(a, b),
                "w0_tilde" => w0_tilde(a, b, c),
                other => panic!("unknown oracle function {other}"),
            };
            OracleCheck {
                func: row[0].clone(),
                args: [a, b, c],
                expected: row[4].parse().unwrap(),
                got,
            }
        })
        .collect()
}

/// Largest gap across the branch points of `ρ` and `δ`, approached from both sides.
pub fn branch_continuity_gap() -> f64 {
    let h = 1e-13;
    let mut gap = 0.0f64;
    for b in [0.5, 0.75] {
        gap = gap.max((rho(b - h).unwrap() - rho(b + h).unwrap()).abs());
        gap = gap.max((rho(b).unwrap() - rho(b + h).unwrap()).abs());
    }
    for k in 1..20 {
        let beta = k as f64 * 0.05;
        for r in [beta / 3.0, beta] {
            if r >= 1.0 {
                continue;
            }
            let lo = delta(beta, r - h).unwrap();
            let hi = delta(beta, (r + h).min(1.0 - 1e-15)).unwrap();
            let at = delta(beta, r).unwrap();
            gap = gap.max((lo - at).abs()).max((hi - at).abs());
        }
    }
    gap
}
