//! CSV emission: UTF-8, comma-separated, one header row, LF line endings.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use barysimplex::cdf_synth::GridTable;
use serde_json::Value;

use crate::report;

/// Formats a table cell with 17 significant digits, enough for an exact
/// `f64` round trip.
pub fn float_cell(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a grid table as CSV to `path`.
pub fn write_grid_table(path: &Path, table: &GridTable) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(|&x| float_cell(x)))?;
    }
    writer.flush()?;
    Ok(())
}

/// Renders a report as a flat two-column `key,value` CSV document.
pub fn flat_report_csv(value: &Value) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["key", "value"])?;
    for (key, cell) in report::flatten(value) {
        writer.write_record([key, cell])?;
    }
    writer.flush()?;
    let bytes = writer.into_inner().context("finishing CSV buffer")?;
    String::from_utf8(bytes).context("CSV output is UTF-8")
}

/// Writes rendered report text to `path`, or to stdout when `path` is
/// `None`.
pub fn emit(path: Option<&Path>, rendered: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout()
                .write_all(rendered.as_bytes())
                .context("writing to stdout")
        }
    }
}
