//! Runs a shortened preset and prints the result table as CSV.
use sparse_hct::experiments::{preset, run_experiment, write_csv, Preset};

fn main() -> sparse_hct::Result<()> {
    let mut cfg = preset(Preset::Exp2a)?;
    cfg.reps = 4;
    let table = run_experiment(&cfg)?;
    write_csv(&table, std::io::stdout())
}
