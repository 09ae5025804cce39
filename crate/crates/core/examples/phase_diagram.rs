//! A small empirical phase diagram at `p = 2000`.
use sparse_hct::experiments::{phase_sweep, SweepConfig};

fn main() -> sparse_hct::Result<()> {
    let sweep = SweepConfig {
        p: 2000,
        beta_grid: vec![0.35, 0.45, 0.55],
        r_grid: vec![0.05, 0.3, 0.8],
        reps: 6,
        ..Default::default()
    };
    let table = phase_sweep(&sweep)?;
    println!("{:>6} {:>6} {:>8} {:>8}  regime", "beta", "r", "rho*", "error");
    for row in &table.rows {
        let c: Vec<f64> = row.coords.iter().map(|c| c.1).collect();
        println!("{:>6} {:>6} {:>8.4} {:>8.3}  {}", c[0], c[1], c[2], row.mean_error, row.note.as_deref().unwrap_or(""));
    }
    Ok(())
}
