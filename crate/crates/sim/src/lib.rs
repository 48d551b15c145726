//! Scenario runner: reads a TOML scenario, runs one study on the `cslfield`
//! library and writes CSV/JSON artifacts.

pub mod config;
pub mod error;
pub mod output;
pub mod studies;
pub mod units;

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use config::{ScenarioConfig, Study};
use error::SimError;

pub struct RunOptions {
    /// Overrides the config's output directory.
    pub out_dir: Option<PathBuf>,
    pub threads: usize,
    pub timestamp: bool,
}

/// Validate `config`, run `study` and write its artifacts. The study named
/// in the file must match the one requested.
pub fn run_scenario(study: Study, config: &ScenarioConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, SimError> {
    if config.study != study {
        return Err(SimError::Config(format!("config is for study `{}`, not `{}`", config.study.name(), study.name())));
    }
    let scenario = config.build().map_err(|errs| SimError::Config(errs.join("; ")))?;
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
    let dir = opts.out_dir.clone().unwrap_or_else(|| config.output.directory.clone());
    let timestamp = opts
        .timestamp
        .then(|| std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    let meta = output::metadata(&scenario, study.name(), timestamp);
    let stem = study.name().replace('-', "_");
    if study == Study::OracleCheck {
        let suites = studies::oracle_check(&scenario)?;
        let all = suites.iter().all(|s| s["passed"] == json!(true));
        let mut report = meta;
        report["suites"] = Value::Array(suites);
        report["all_passed"] = json!(all);
        return Ok(vec![output::write_report(&report, &dir, &stem)?]);
    }
    let table = studies::run_table(study, &scenario, opts.threads)?;
    output::write_table(&table, &meta, &dir, &stem, &config.output.formats)
}

/// Parse-only check of a scenario file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({ "valid": self.is_valid(), "errors": self.errors, "warnings": self.warnings })
    }
}

/// Lists violations without running anything. Only an unreadable file is an
/// error here.
pub fn validate_config(path: &Path) -> Result<ValidationReport, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
    Ok(validate_text(&text))
}

pub fn validate_text(text: &str) -> ValidationReport {
    match config::parse(text) {
        Err(e) => ValidationReport { errors: vec![e.to_string()], warnings: Vec::new() },
        Ok(cfg) => match cfg.build() {
            Ok(s) => ValidationReport { errors: Vec::new(), warnings: s.warnings },
            Err(errors) => ValidationReport { errors, warnings: Vec::new() },
        },
    }
}
