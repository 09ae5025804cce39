use crate::classifier::{CvConfig, OmegaSource};
use crate::error::Result;
use crate::model::{OmegaSpec, SignalSpec};

use super::sweep::SweepConfig;
use super::{fixed_estimation, ExperimentConfig, Method, PointConfig, Preset, DEFAULT_MEMORY_CAP};

/// Default seed shared by all presets.
pub const DEFAULT_SEED: u64 = 20_130_501;

fn base(preset: Preset, methods: &[Method], plot_x: &str) -> ExperimentConfig {
    ExperimentConfig {
        preset,
        seed: DEFAULT_SEED,
        reps: 25,
        test_size: 500,
        methods: methods.to_vec(),
        cv: CvConfig::default(),
        cv_omega: OmegaSource::True,
        memory_cap_bytes: DEFAULT_MEMORY_CAP,
        plot_x: plot_x.into(),
        points: Vec::new(),
    }
}

/// `lo, lo + step, …, hi` computed in tenths so the values print exactly.
fn tenths(lo: u32, hi: u32, step: u32) -> Vec<f64> {
    (lo..=hi).step_by(step as usize).map(|k| f64::from(k) / 10.0).collect()
}

const EXP1: [Method; 3] = [Method::Hct, Method::Phct, Method::Ohct];

/// One column of the comparison table.
struct Case {
    p: usize,
    n: usize,
    eps: f64,
    tau: f64,
    a1: f64,
    a2: f64,
}

impl Case {
    fn point(&self, k: usize, signal: SignalSpec) -> PointConfig {
        let omega = if self.a2 == 0.0 {
            OmegaSpec::Tridiagonal { a: self.a1 }
        } else {
            OmegaSpec::FiveDiagonal { a1: self.a1, a2: self.a2 }
        };
        let mut pt = PointConfig::literal(self.p, self.n, self.eps, self.tau, omega).with_coords(&[
            ("case", k as f64),
            ("p", self.p as f64),
            ("n", self.n as f64),
            ("eps", self.eps),
            ("tau", self.tau),
            ("a1", self.a1),
            ("a2", self.a2),
        ]);
        pt.signal = signal;
        pt
    }
}

const POINT_MASS_CASES: [Case; 6] = [
    Case { p: 2000, n: 1000, eps: 0.1, tau: 4.0, a1: 0.05, a2: 0.0 },
    Case { p: 3000, n: 2000, eps: 0.2, tau: 3.0, a1: 0.45, a2: 0.0 },
    Case { p: 3000, n: 2000, eps: 0.1, tau: 4.0, a1: 0.45, a2: 0.2 },
    Case { p: 1000, n: 500, eps: 0.1, tau: 4.0, a1: 0.05, a2: 0.0 },
    Case { p: 3000, n: 2000, eps: 0.05, tau: 5.0, a1: 0.45, a2: 0.0 },
    Case { p: 3000, n: 2000, eps: 0.05, tau: 4.0, a1: 0.35, a2: 0.2 },
];

/// Uniform signal laws on `[τ - 0.5, τ + 0.5]`.
const UNIFORM_CASES: [Case; 3] = [
    Case { p: 2000, n: 1000, eps: 0.1, tau: 4.0, a1: 0.05, a2: 0.0 },
    Case { p: 3000, n: 2000, eps: 0.2, tau: 3.0, a1: 0.45, a2: 0.0 },
    Case { p: 3000, n: 2000, eps: 0.1, tau: 4.0, a1: 0.45, a2: 0.2 },
];

pub fn preset(which: Preset) -> Result<ExperimentConfig> {
    Ok(match which {
        Preset::Exp1a => {
            let mut cfg = base(which, &EXP1, "a");
            let a = [0.05, 0.15, 0.2, 0.35, 0.4, 0.45];
            let eta = [0.1, 0.1, 0.15, 0.15, 0.2, 0.25];
            let zeta = [0.05, 0.1, 0.1, 0.2, 0.25, 0.3];
            for k in 0..a.len() {
                let mut pt = PointConfig::literal(3000, 2000, 0.1, 4.0, OmegaSpec::Tridiagonal { a: a[k] })
                    .with_coords(&[("a", a[k])]);
                pt.estimation = Some(fixed_estimation(eta[k], zeta[k]));
                cfg.points.push(pt);
            }
            cfg
        }
        Preset::Exp1b => {
            let mut cfg = base(which, &EXP1, "case");
            cfg.points = POINT_MASS_CASES
                .iter()
                .enumerate()
                .map(|(k, c)| c.point(k + 1, SignalSpec::default()))
                .collect();
            cfg
        }
        Preset::Exp1c => {
            let mut cfg = base(which, &EXP1, "case");
            cfg.points = UNIFORM_CASES
                .iter()
                .enumerate()
                .map(|(k, c)| c.point(k + 1, SignalSpec::uniform(c.tau - 0.5, c.tau + 0.5)))
                .collect();
            cfg
        }
        Preset::Exp2a => {
            let mut cfg = base(which, &[Method::Phct, Method::Cvt], "n");
            for eps in [0.1, 0.05] {
                for n in [100, 50, 20] {
                    cfg.points.push(
                        PointConfig::literal(3000, n, eps, 1.8, OmegaSpec::Tridiagonal { a: 0.2 })
                            .with_coords(&[("eps", eps), ("n", n as f64)]),
                    );
                }
            }
            cfg
        }
        Preset::Exp2b => {
            let mut cfg = base(which, &[Method::Phct, Method::Cvt], "tau");
            for n in [20, 40] {
                for tau in tenths(10, 25, 1) {
                    cfg.points.push(
                        PointConfig::literal(3000, n, 0.05, tau, OmegaSpec::Tridiagonal { a: 0.2 })
                            .with_coords(&[("n", n as f64), ("tau", tau)]),
                    );
                }
            }
            cfg
        }
        Preset::Exp3 => {
            let mut cfg = base(which, &[Method::Hct, Method::Cvt], "tau");
            cfg.reps = 6;
            cfg.cv_omega = OmegaSource::Estimated;
            cfg.cv.max_grid_points = 50;
            let omega = OmegaSpec::BlockFiveDiagonal {
                num_blocks: 10,
                block_size: 500,
                a1: 0.45,
                a2: 0.1,
            };
            for tau in tenths(10, 30, 2) {
                cfg.points
                    .push(PointConfig::literal(5000, 500, 0.1, tau, omega.clone()).with_coords(&[("tau", tau)]));
            }
            cfg
        }
        Preset::PhaseSweep => SweepConfig::default().to_experiment()?.0,
        Preset::Custom => base(which, &EXP1, "case"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp1a_tuning_is_baked_in() {
        let cfg = preset(Preset::Exp1a).unwrap();
        assert_eq!(cfg.points.len(), 6);
        assert_eq!(cfg.points[5].coords, vec![("a".to_string(), 0.45)]);
        assert_eq!(cfg.points[5].estimation, Some(fixed_estimation(0.25, 0.3)));
    }

    #[test]
    fn grids_have_expected_sizes() {
        assert_eq!(preset(Preset::Exp2a).unwrap().points.len(), 6);
        let b = preset(Preset::Exp2b).unwrap();
        assert_eq!(b.points.len(), 32);
        assert_eq!(b.points[15].tau, Some(2.5));
        let e3 = preset(Preset::Exp3).unwrap();
        assert_eq!(e3.points.len(), 11);
        assert_eq!(e3.reps, 6);
        assert_eq!(e3.points[10].tau, Some(3.0));
    }

    #[test]
    fn all_presets_validate() {
        for p in Preset::ALL {
            preset(p).unwrap().validate().unwrap();
        }
    }
}
