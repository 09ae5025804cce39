use std::process::Command;

use sparse_hct::classifier::{evaluate, fit_cvt, fit_hct, ClassifierModel, CvConfig, OmegaSource};
use sparse_hct::experiments::{preset, resolve_config, run_experiment, write_csv, ExperimentOverrides, Method, Preset};
use sparse_hct::hct::{ThresholdBounds, TransformMode};
use sparse_hct::model::{build_omega, sample_dataset, sample_mu, Dataset, LabelScheme, NoiseSampler, OmegaSpec, RareWeakParams, SignalSpec};
use sparse_hct::precision_est::{estimate_precision, EstimationConfig};
use sparse_hct::rng::substream;

fn draw(p: usize, n: usize, eps: f64, tau: f64, spec: &OmegaSpec, seed: u64) -> (RareWeakParams, Dataset, Dataset) {
    let params = RareWeakParams::from_literals(p, n, eps, tau).unwrap();
    let omega = build_omega(spec, p).unwrap();
    let sampler = NoiseSampler::new(&omega).unwrap();
    let mut rng = substream(seed, 0);
    let mu = sample_mu(&params, &SignalSpec::default(), &mut rng).unwrap().mu;
    let train = sample_dataset(&mu, &sampler, n, LabelScheme::Balanced, &mut rng).unwrap();
    let test = sample_dataset(&mu, &sampler, 2000, LabelScheme::Random, &mut rng).unwrap();
    (params, train, test)
}

#[test]
fn estimate_approaches_truth_with_many_samples() {
    let spec = OmegaSpec::Tridiagonal { a: 0.4 };
    let (_, train, _) = draw(40, 20_000, 0.1, 0.5, &spec, 1);
    let omega = build_omega(&spec, 40).unwrap();
    let est = estimate_precision(&train, &EstimationConfig::fixed(0.15, 0.1), None).unwrap();
    assert!(est.omega.max_abs_diff(&omega) < 0.1, "{}", est.omega.max_abs_diff(&omega));
    let k3 = estimate_precision(&train, &EstimationConfig::oracle(3), Some(&omega)).unwrap();
    assert!(k3.omega.max_abs_diff(&omega) < 0.1);
}

#[test]
fn known_precision_beats_ignoring_it() {
    let spec = OmegaSpec::Tridiagonal { a: 0.45 };
    let (params, train, test) = draw(800, 200, 0.05, 3.0, &spec, 2);
    let omega = build_omega(&spec, 800).unwrap();
    let b = ThresholdBounds::from(&params);
    let (it, _) = fit_hct(&train, &omega, OmegaSource::True, b, TransformMode::It).unwrap();
    let (bt, _) = fit_hct(&train, &omega, OmegaSource::True, b, TransformMode::Bt).unwrap();
    let e_it = evaluate(&it, &test).unwrap();
    assert!(e_it < 0.2, "{e_it}");
    assert!(e_it <= evaluate(&bt, &test).unwrap());
}

#[test]
fn cross_validation_is_seeded() {
    let spec = OmegaSpec::Tridiagonal { a: 0.2 };
    let (params, train, _) = draw(300, 60, 0.05, 2.0, &spec, 3);
    let omega = build_omega(&spec, 300).unwrap();
    let b = ThresholdBounds::from(&params);
    let fit = |s| fit_cvt(&train, &omega, OmegaSource::True, b, TransformMode::It, &CvConfig::default(), &mut substream(s, 0)).unwrap();
    assert_eq!(fit(4).threshold, fit(4).threshold);
    let t = fit(4).threshold;
    assert!(t > 0.0 && t <= params.s_star());
}

#[test]
fn model_survives_json() {
    let spec = OmegaSpec::Identity;
    let (params, train, test) = draw(100, 40, 0.1, 3.0, &spec, 4);
    let (model, _) = fit_hct(&train, &build_omega(&spec, 100).unwrap(), OmegaSource::True, (&params).into(), TransformMode::It).unwrap();
    let mut buf = Vec::new();
    model.to_json(&mut buf).unwrap();
    let back = ClassifierModel::from_json(buf.as_slice()).unwrap();
    assert_eq!(back, model);
    assert_eq!(evaluate(&back, &test).unwrap(), evaluate(&model, &test).unwrap());
}

#[test]
fn config_file_wins_over_flags() {
    let flags = ExperimentOverrides { reps: Some(7), seed: Some(3), ..Default::default() };
    let file = ExperimentOverrides::from_toml("reps = 2\nmethods = [\"pHCT\"]\n").unwrap();
    let cfg = resolve_config(Some(Preset::Exp2a), &flags, Some(&file)).unwrap();
    assert_eq!(cfg.reps, 2);
    assert_eq!(cfg.seed, 3);
    assert_eq!(cfg.methods, vec![Method::Phct]);
    assert_eq!(cfg.points.len(), preset(Preset::Exp2a).unwrap().points.len());
}

#[test]
fn experiment_csv_shape() {
    let mut cfg = preset(Preset::Exp2a).unwrap();
    cfg.reps = 2;
    cfg.points.truncate(2);
    let t = run_experiment(&cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&t, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,n,method,reps,mean_error,sd_error,se_error,mean_threshold,note");
    assert_eq!(lines.len(), 1 + 2 * cfg.methods.len());
}

fn hct(args: &[&str], dir: &std::path::Path) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_hct")).args(args).current_dir(dir).output().unwrap();
    out
}

#[test]
fn cli_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |args: &[&str]| {
        let o = hct(args, d);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        o
    };
    ok(&["simulate", "--p", "150", "--n", "80", "--eps", "0.05", "--tau", "3", "--omega", "tridiagonal:0.3",
        "--out", "train.csv", "--test-size", "300", "--test-out", "test.csv"]);
    ok(&["estimate", "--in", "train.csv", "--k", "3", "--out", "omega.txt"]);
    ok(&["fit", "--in", "train.csv", "--omega-file", "omega.txt", "--out", "model.json"]);
    let o = ok(&["classify", "--model", "model.json", "--in", "test.csv"]);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 301);
    assert!(String::from_utf8_lossy(&o.stderr).contains("test error"));

    let o = ok(&["theory", "--curve", "delta", "--points", "5", "--beta", "0.6"]);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("r,delta,t_star_over_tau\n"));

    std::fs::write(d.join("cfg.toml"), "reps = 1\ntest_size = 50\n").unwrap();
    let o = ok(&["experiment", "--preset", "exp2a", "--reps", "3", "--config", "cfg.toml"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(3) == Some("1")));

    std::fs::write(d.join("bad.toml"), "repz = 1\n").unwrap();
    assert!(!hct(&["experiment", "--preset", "exp2a", "--config", "bad.toml"], d).status.success());
    assert!(!hct(&["experiment", "--preset", "nope"], d).status.success());
}
