use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sparse_hct::classifier::{fit_cvt, fit_hct, predict, score, ClassifierModel, CvConfig, OmegaSource};
use sparse_hct::experiments::{
    emit, phase_sweep, resolve_config, run_experiment, ExperimentOverrides, Method, OutputFormat, Preset,
    SweepConfig,
};
use sparse_hct::hct::{ThresholdBounds, TransformMode};
use sparse_hct::model::{
    build_omega, s_star, s_tilde, sample_dataset, sample_mu, Dataset, LabelScheme, NoiseSampler, OmegaSpec,
    RareWeakParams, SignalSpec,
};
use sparse_hct::precision_est::{
    estimate_precision, read_triplets, write_triplets, EstimationConfig, EtaMode, ZetaMode, DEFAULT_ETA_GRID,
};
use sparse_hct::rng::substream;
use sparse_hct::theory::{delta, functional_curves, rho, rho_star, t_star, write_curves_csv};
use sparse_hct::{HctError, Result, SparseSymMatrix};

/// Thread count for the global pool; unset means one per core.
const THREADS_ENV: &str = "HCT_THREADS";

#[derive(Parser)]
#[command(name = "hct", version, about = "Higher Criticism thresholding for sparse LDA")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a simulation preset or a config file.
    Experiment(ExperimentArgs),
    /// Empirical phase diagram over a (beta, r) grid.
    Sweep(SweepArgs),
    /// Tabulate a theoretical curve.
    Theory(TheoryArgs),
    /// Estimate a sparse precision matrix from labeled training data.
    Estimate(EstimateArgs),
    /// Apply a fitted model to a dataset.
    Classify(ClassifyArgs),
    /// Draw a training (and optional test) set.
    Simulate(SimulateArgs),
    /// Fit a classifier on a training set.
    Fit(FitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Plot,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Plot => OutputFormat::Plot,
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    preset: Option<Preset>,
    /// TOML file; its values override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    test_size: Option<usize>,
    /// Comma-separated, e.g. `HCT,pHCT,oHCT`.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    memory_cap_bytes: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    beta_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    r_grid: Option<Vec<f64>>,
    /// e.g. `tridiagonal:0.3`.
    #[arg(long)]
    omega: Option<OmegaSpec>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    test_size: Option<usize>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    seed: Option<u64>,
    /// TOML file of sweep fields; its values override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    Rho,
    Delta,
    W0,
    Sep,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, value_enum)]
    curve: Curve,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.6)]
    beta: f64,
    #[arg(long, default_value_t = 0.3)]
    r: f64,
    #[arg(long, default_value_t = 1_000_000)]
    p: usize,
    #[arg(long, default_value = "identity")]
    omega: OmegaSpec,
    /// Grid size.
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Monte Carlo repetitions for non-identity `omega`.
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TuningArgs {
    /// Fixed BLT threshold; held-out selection over the default grid when absent.
    #[arg(long)]
    eta: Option<f64>,
    /// Fixed refit threshold.
    #[arg(long, conflicts_with = "k")]
    zeta: Option<f64>,
    /// Keep `k` nonzeros per row in the refit.
    #[arg(long)]
    k: Option<usize>,
}

impl TuningArgs {
    fn config(&self) -> Result<EstimationConfig> {
        let eta = match self.eta {
            Some(eta) => EtaMode::Fixed { eta },
            None => EtaMode::HeldOut {
                grid: DEFAULT_ETA_GRID.to_vec(),
            },
        };
        let zeta = match (self.zeta, self.k) {
            (Some(z), _) => ZetaMode::Fixed(z),
            (None, Some(k)) => ZetaMode::TargetRowNonzeros(k),
            (None, None) => return Err(HctError::Usage("give --zeta or --k".into())),
        };
        let cfg = EstimationConfig { eta, zeta };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Output triplet file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// JSON model written by `fit`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    /// Predictions CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value = "identity")]
    omega: OmegaSpec,
    /// `point_mass` or `uniform:LO,HI`.
    #[arg(long, default_value = "point_mass")]
    signal: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    test_size: usize,
    #[arg(long)]
    test_out: Option<PathBuf>,
    /// Also write the true precision matrix as triplets.
    #[arg(long)]
    omega_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    It,
    Bt,
    Wt,
}

impl From<ModeArg> for TransformMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::It => TransformMode::It,
            ModeArg::Bt => TransformMode::Bt,
            ModeArg::Wt => TransformMode::Wt,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Thresholding {
    Hc,
    Cv,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Precision matrix as triplets (e.g. from `estimate`).
    #[arg(long, conflicts_with = "omega")]
    omega_file: Option<PathBuf>,
    /// Known structure such as `tridiagonal:0.45`.
    #[arg(long)]
    omega: Option<OmegaSpec>,
    /// Estimate the precision matrix from the training data.
    #[arg(long, conflicts_with_all = ["omega", "omega_file"])]
    estimate: bool,
    #[command(flatten)]
    tuning: TuningArgs,
    #[arg(long, value_enum, default_value = "it")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "hc")]
    threshold: Thresholding,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    let mut d = Dataset::read_csv(BufReader::new(File::open(path)?))?;
    d.provenance = path.display().to_string();
    Ok(d)
}

fn parse_signal(s: &str) -> Result<SignalSpec> {
    if s == "point_mass" {
        return Ok(SignalSpec::default());
    }
    let bad = || HctError::Config(format!("bad signal law `{s}`"));
    let rest = s.strip_prefix("uniform:").ok_or_else(bad)?;
    let (lo, hi) = rest.split_once(',').ok_or_else(bad)?;
    let spec = SignalSpec::uniform(lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    spec.validate()?;
    Ok(spec)
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let flags = ExperimentOverrides {
        preset: a.preset,
        seed: a.seed,
        reps: a.reps,
        test_size: a.test_size,
        methods: a.methods,
        memory_cap_bytes: a.memory_cap_bytes,
        ..Default::default()
    };
    let file = match &a.config {
        Some(p) => Some(ExperimentOverrides::from_toml(&fs::read_to_string(p)?)?),
        None => None,
    };
    let cfg = resolve_config(None, &flags, file.as_ref())?;
    let table = run_experiment(&cfg)?;
    emit(&table, a.format.into(), a.out.as_deref())
}

#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SweepOverrides {
    theta: Option<f64>,
    p: Option<usize>,
    omega: Option<OmegaSpec>,
    beta_grid: Option<Vec<f64>>,
    r_grid: Option<Vec<f64>>,
    reps: Option<usize>,
    test_size: Option<usize>,
    method: Option<Method>,
    seed: Option<u64>,
}

impl SweepOverrides {
    fn apply(self, s: &mut SweepConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { s.$f = v; })* };
        }
        set!(theta, p, omega, beta_grid, r_grid, reps, test_size, method, seed);
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let mut s = SweepConfig::default();
    SweepOverrides {
        theta: a.theta,
        p: a.p,
        omega: a.omega,
        beta_grid: a.beta_grid,
        r_grid: a.r_grid,
        reps: a.reps,
        test_size: a.test_size,
        method: a.method,
        seed: a.seed,
    }
    .apply(&mut s);
    if let Some(p) = &a.config {
        let o: SweepOverrides = toml::from_str(&fs::read_to_string(p)?).map_err(|e| HctError::Config(e.to_string()))?;
        o.apply(&mut s);
    }
    let table = phase_sweep(&s)?;
    for note in &table.notes {
        eprintln!("{note}");
    }
    emit(&table, a.format.into(), a.out.as_deref())
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect()
}

fn cmd_theory(a: TheoryArgs) -> Result<()> {
    let mut out = csv::Writer::from_writer(sink(a.out.as_deref())?);
    let fmt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    match a.curve {
        Curve::Rho => {
            out.write_record(["beta", "rho", "rho_star"])?;
            for b in grid(0.0, 1.0, a.points) {
                let rs = rho_star(b, a.theta).ok();
                out.write_record([b.to_string(), rho(b)?.to_string(), fmt(rs)])?;
            }
        }
        Curve::Delta => {
            out.write_record(["r", "delta", "t_star_over_tau"])?;
            for r in grid(0.0, 1.0, a.points) {
                out.write_record([r.to_string(), delta(a.beta, r)?.to_string(), t_star(a.beta, r, 1.0)?.to_string()])?;
            }
        }
        Curve::W0 | Curve::Sep => {
            let theta = if a.theta > 0.0 { a.theta } else { 0.3 };
            let params = RareWeakParams::from_exponents(a.p, a.beta, a.r, theta)?;
            let omega = build_omega(&a.omega, a.p)?;
            let ts = grid(0.0, params.s_star(), a.points);
            let rows = functional_curves(&ts, &params, &omega, &SignalSpec::default(), a.reps, a.seed)?;
            drop(out);
            return write_curves_csv(&rows, sink(a.out.as_deref())?);
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    let data = read_dataset(&a.input)?;
    let est = estimate_precision(&data, &a.tuning.config()?, None)?;
    eprintln!(
        "eta = {}, ridge = {}, refit asymmetry = {:e}, nonzeros = {}",
        est.eta,
        est.ridge,
        est.asymmetry,
        est.omega.nnz()
    );
    write_triplets(&est.omega, sink(a.out.as_deref())?)
}

fn cmd_classify(a: ClassifyArgs) -> Result<()> {
    let model = ClassifierModel::from_json(BufReader::new(File::open(&a.model)?))?;
    let data = read_dataset(&a.input)?;
    let mut out = csv::Writer::from_writer(sink(a.out.as_deref())?);
    out.write_record(["index", "score", "predicted"])?;
    let mut wrong = 0usize;
    for (i, x) in data.rows().enumerate() {
        let yhat = predict(&model, x)?;
        if data.labels().is_some_and(|l| l[i] != yhat) {
            wrong += 1;
        }
        out.write_record([i.to_string(), score(&model, x)?.to_string(), yhat.to_string()])?;
    }
    out.flush()?;
    if data.is_labeled() {
        eprintln!("test error = {}", wrong as f64 / data.n() as f64);
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let params = match (a.n, a.eps, a.tau, a.theta, a.beta, a.r) {
        (Some(n), Some(eps), Some(tau), None, None, None) => RareWeakParams::from_literals(a.p, n, eps, tau)?,
        (None, None, None, Some(theta), Some(beta), Some(r)) => RareWeakParams::from_exponents(a.p, beta, r, theta)?,
        _ => return Err(HctError::Usage("give either --n --eps --tau or --theta --beta --r".into())),
    };
    let omega = build_omega(&a.omega, a.p)?;
    let sampler = NoiseSampler::new(&omega)?;
    let mut rng = substream(a.seed, 0);
    let draw = sample_mu(&params, &parse_signal(&a.signal)?, &mut rng)?;
    let train = sample_dataset(&draw.mu, &sampler, params.n, LabelScheme::Balanced, &mut rng)?;
    train.write_csv(BufWriter::new(File::create(&a.out)?))?;
    if let Some(path) = &a.test_out {
        if a.test_size == 0 {
            return Err(HctError::Usage("--test-out needs --test-size".into()));
        }
        let test = sample_dataset(&draw.mu, &sampler, a.test_size, LabelScheme::Random, &mut rng)?;
        test.write_csv(BufWriter::new(File::create(path)?))?;
    }
    if let Some(path) = &a.omega_out {
        write_triplets(&omega, BufWriter::new(File::create(path)?))?;
    }
    eprintln!("p = {}, n = {}, eps = {}, tau = {}, signals = {}", params.p, params.n, params.eps, params.tau, draw.support.len());
    Ok(())
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let data = read_dataset(&a.input)?;
    let (omega, source): (SparseSymMatrix, OmegaSource) = if let Some(path) = &a.omega_file {
        (read_triplets(BufReader::new(File::open(path)?))?, OmegaSource::Estimated)
    } else if let Some(spec) = &a.omega {
        (build_omega(spec, data.p())?, OmegaSource::True)
    } else if a.estimate {
        (estimate_precision(&data, &a.tuning.config()?, None)?.omega, OmegaSource::Estimated)
    } else {
        (SparseSymMatrix::identity(data.p()), OmegaSource::Diagonal)
    };
    let bounds = ThresholdBounds {
        s_star: s_star(data.p()),
        s_tilde: s_tilde(data.p(), data.n()),
    };
    let model = match a.threshold {
        Thresholding::Hc => fit_hct(&data, &omega, source, bounds, a.mode.into())?.0,
        Thresholding::Cv => {
            let mut rng = substream(a.seed, 0);
            fit_cvt(&data, &omega, source, bounds, a.mode.into(), &CvConfig::default(), &mut rng)?
        }
    };
    eprintln!("threshold = {}, selected = {}", model.threshold, model.num_selected);
    model.to_json(BufWriter::new(File::create(&a.out)?))
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| HctError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HctError::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<()> {
        init_threads()?;
        match cli.cmd {
            Cmd::Experiment(a) => cmd_experiment(a),
            Cmd::Sweep(a) => cmd_sweep(a),
            Cmd::Theory(a) => cmd_theory(a),
            Cmd::Estimate(a) => cmd_estimate(a),
            Cmd::Classify(a) => cmd_classify(a),
            Cmd::Simulate(a) => cmd_simulate(a),
            Cmd::Fit(a) => cmd_fit(a),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
