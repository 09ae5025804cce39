use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HctError, Result};

use super::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    /// `(x, y, series)` triples.
    Plot,
}

impl FromStr for OutputFormat {
    type Err = HctError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "plot" => Ok(OutputFormat::Plot),
            _ => Err(HctError::Config(format!("unknown format `{s}`"))),
        }
    }
}

/// `v` rounded to six significant digits, printed in shortest form.
pub fn format_sig(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("formatted float parses");
    rounded.to_string()
}

pub fn write_csv<W: Write>(table: &ResultTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = table.coord_names.iter().map(String::as_str).collect();
    header.extend(["method", "reps", "mean_error", "sd_error", "se_error", "mean_threshold", "note"]);
    out.write_record(&header)?;
    for row in &table.rows {
        let mut rec: Vec<String> = table
            .coord_names
            .iter()
            .map(|n| table.coord(row, n).map_or_else(String::new, format_sig))
            .collect();
        rec.push(row.method.to_string());
        rec.push(row.reps.to_string());
        for v in [row.mean_error, row.sd_error, row.se_error, row.mean_threshold] {
            rec.push(format_sig(v));
        }
        rec.push(row.note.clone().unwrap_or_default());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(table: &ResultTable, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, table)?;
    Ok(())
}

/// One `(x, mean_error, series)` line per row; `x` is the configured plot
/// coordinate and the series names the method plus every other coordinate.
pub fn write_plot<W: Write>(table: &ResultTable, w: W) -> Result<()> {
    let xname = &table.config.plot_x;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y", "series"])?;
    for row in &table.rows {
        let x = table.coord(row, xname).unwrap_or(row.point as f64);
        let mut series = row.method.to_string();
        for (k, v) in &row.coords {
            if k != xname {
                series.push_str(&format!(" {k}={}", format_sig(*v)));
            }
        }
        out.write_record([format_sig(x), format_sig(row.mean_error), series])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `table` to `path`, or to stdout when `path` is `None`.
pub fn emit(table: &ResultTable, format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match format {
        OutputFormat::Csv => write_csv(table, sink),
        OutputFormat::Json => write_json(table, sink),
        OutputFormat::Plot => write_plot(table, sink),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig(0.069_812_345), "0.0698123");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(123_456_789.0), "123457000");
        assert_eq!(format_sig(0.0), "0");
    }
}
