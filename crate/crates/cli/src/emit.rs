//! Report files.
//!
//! `report.json` holds the whole [`RunReport`]. `trajectories.csv` has one
//! row per trajectory with columns
//! `trajectory_index, jump_count, jump_steps, weight, fidelity`; jump steps
//! are `;`-separated and reals carry 17 significant digits.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::report::{RunReport, TrajectoryRow};

pub const STRUCTURED_FILE: &str = "report.json";
pub const TABULAR_FILE: &str = "trajectories.csv";
pub const TABULAR_HEADER: [&str; 5] = ["trajectory_index", "jump_count", "jump_steps", "weight", "fidelity"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Structured,
    Tabular,
}

/// Real number with 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_json(report: &RunReport) -> Result<String, CliError> {
    serde_json::to_string_pretty(report)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Engine {
            module: "emit",
            message: e.to_string(),
        })
}

pub fn from_json(text: &str) -> Result<RunReport, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(format!("report: {e}")))
}

pub fn write_tabular<W: Write>(rows: &[TrajectoryRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABULAR_HEADER)?;
    for r in rows {
        let steps: Vec<String> = r.jumps.iter().map(|(m, _)| m.to_string()).collect();
        w.write_record([
            r.index.to_string(),
            r.jumps.len().to_string(),
            steps.join(";"),
            format_real(r.weight),
            format_real(r.fidelity),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the requested formats into `dir`, creating it if needed.
pub fn emit(report: &RunReport, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for format in formats {
        match format {
            Format::Structured => {
                let path = dir.join(STRUCTURED_FILE);
                fs::write(&path, to_json(report)?).map_err(|e| CliError::io(&path, e))?;
                written.push(path);
            }
            Format::Tabular => {
                let path = dir.join(TABULAR_FILE);
                let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
                write_tabular(&report.trajectories, file).map_err(|e| match e.into_kind() {
                    csv::ErrorKind::Io(io) => CliError::io(&path, io),
                    other => CliError::Engine {
                        module: "emit",
                        message: format!("{other:?}"),
                    },
                })?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
