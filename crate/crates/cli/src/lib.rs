//! Declarative experiment runner: a TOML file in, JSON and CSV reports out.

pub mod config;
pub mod emit;
pub mod error;
pub mod report;
pub mod runner;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_config, Mode, RunConfig};
pub use emit::{emit, Format};
pub use error::CliError;
pub use report::RunReport;
pub use runner::run;

/// Command-line overrides of configuration fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(out) = &self.out {
            config.output.dir = out.clone();
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(mode) = self.mode {
            config.mode = mode;
        }
    }
}

/// Loads `path`, applies overrides, runs and writes the configured outputs.
pub fn run_file(path: &Path, overrides: &Overrides) -> Result<(RunReport, Vec<PathBuf>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut config = parse_config(&text)?;
    overrides.apply(&mut config);
    config.validate()?;
    let report = run(&config)?;
    let mut formats = Vec::new();
    if config.output.structured {
        formats.push(Format::Structured);
    }
    if config.output.tabular {
        formats.push(Format::Tabular);
    }
    let written = emit(&report, &config.output.dir, &formats)?;
    Ok((report, written))
}
