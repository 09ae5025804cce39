use serde::{Deserialize, Serialize};

use crate::error::{HctError, Result};
use crate::model::OmegaSpec;
use crate::theory::{regime_classify, rho_star, Regime};

use super::presets::DEFAULT_SEED;
use super::{preset, run_experiment, ExperimentConfig, Method, PointConfig, Preset, ResultTable};

/// A `(β, r)` grid at fixed `θ` and `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub theta: f64,
    pub p: usize,
    pub omega: OmegaSpec,
    pub beta_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub reps: usize,
    pub test_size: usize,
    pub method: Method,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            theta: 0.4,
            p: 10_000,
            omega: OmegaSpec::Tridiagonal { a: 0.3 },
            beta_grid: vec![0.32, 0.4, 0.45, 0.5, 0.55],
            r_grid: vec![0.02, 0.1, 0.3, 0.5, 0.9],
            reps: 50,
            test_size: 500,
            method: Method::Phct,
            seed: DEFAULT_SEED,
        }
    }
}

impl SweepConfig {
    /// The experiment covering the grid points inside the strip
    /// `(1 - θ)/2 < β < 1 - θ`, plus one note per skipped point.
    pub fn to_experiment(&self) -> Result<(ExperimentConfig, Vec<String>)> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(HctError::Domain {
                name: "theta",
                value: self.theta,
                domain: "(0, 1)".into(),
            });
        }
        let mut cfg = preset(Preset::Custom)?;
        cfg.preset = Preset::PhaseSweep;
        cfg.seed = self.seed;
        cfg.reps = self.reps;
        cfg.test_size = self.test_size;
        cfg.methods = vec![self.method];
        cfg.plot_x = "beta".into();
        let (lo, hi) = ((1.0 - self.theta) / 2.0, 1.0 - self.theta);
        let mut notes = Vec::new();
        for &beta in &self.beta_grid {
            for &r in &self.r_grid {
                if !(beta > lo && beta < hi) {
                    notes.push(format!("skipped (beta={beta}, r={r}): beta outside ({lo}, {hi})"));
                    continue;
                }
                if !(r > 0.0 && r < 1.0) {
                    notes.push(format!("skipped (beta={beta}, r={r}): r outside (0, 1)"));
                    continue;
                }
                let rs = rho_star(beta, self.theta)?;
                cfg.points.push(
                    PointConfig::exponents(self.p, self.theta, beta, r, self.omega.clone())
                        .with_coords(&[("beta", beta), ("r", r), ("rho_star", rs)]),
                );
            }
        }
        Ok((cfg, notes))
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Possible => "possible",
        Regime::Impossible => "impossible",
        Regime::Boundary => "boundary",
        Regime::RelativelyDense => "relatively_dense",
        Regime::RelativelySparse => "relatively_sparse",
    }
}

/// Runs the grid and labels each row with its side of `r = ρ*_θ(β)`.
pub fn phase_sweep(sweep: &SweepConfig) -> Result<ResultTable> {
    let (cfg, notes) = sweep.to_experiment()?;
    let mut table = run_experiment(&cfg)?;
    for row in &mut table.rows {
        let beta = row.coords[0].1;
        let r = row.coords[1].1;
        row.note = Some(regime_name(regime_classify(beta, r, sweep.theta)?).into());
    }
    table.notes = notes;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_outside_the_strip_are_skipped() {
        let s = SweepConfig {
            beta_grid: vec![0.2, 0.45, 0.7],
            r_grid: vec![0.5],
            ..Default::default()
        };
        let (cfg, notes) = s.to_experiment().unwrap();
        assert_eq!(cfg.points.len(), 1);
        assert_eq!(notes.len(), 2);
        assert_eq!(cfg.points[0].params().unwrap().n, 40);
    }

    #[test]
    fn boundary_point_is_flagged() {
        let s = SweepConfig {
            p: 200,
            beta_grid: vec![0.45],
            r_grid: vec![rho_star(0.45, 0.4).unwrap(), 0.9],
            reps: 1,
            test_size: 20,
            ..Default::default()
        };
        let t = phase_sweep(&s).unwrap();
        assert_eq!(t.rows[0].note.as_deref(), Some("boundary"));
        assert_eq!(t.rows[1].note.as_deref(), Some("possible"));
    }
}
