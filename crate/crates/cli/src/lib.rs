//! Experiment driver: JSON configs in, reports, CSV series and a checksummed manifest out.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiments::{execute, Check, Outcome};
pub use output::{RunManifest, Series};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output directory: the override, else the config's `out`, else `runs/<experiment>-<hash prefix>`.
pub fn output_dir(name: &str, cfg: &ExperimentConfig, overridden: Option<&Path>) -> PathBuf {
    overridden
        .map(Path::to_path_buf)
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(format!("{name}-{}", &cfg.hash()[..12])))
}

/// Runs one experiment and writes `report.json`, `series/*.csv` and `manifest.json` into `dir`.
pub fn run(name: &str, cfg: &ExperimentConfig, dir: &Path) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let outcome = execute(name, cfg)?;
    let hash = cfg.hash();
    let report = json!({
        "experiment": name,
        "tool_version": TOOL_VERSION,
        "config_hash": hash,
        "config": cfg,
        "derived": cfg.model()?.derive(),
        "result": outcome.result,
        "checks": outcome.checks,
    });
    let files = output::write_outputs(dir, &report, &outcome.series)?;
    let manifest = RunManifest {
        experiment: name.to_string(),
        config_hash: hash,
        tool_version: TOOL_VERSION.to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        files,
        checks_failed: outcome.checks.iter().filter(|c| !c.passed).count(),
    };
    output::write_manifest(dir, &manifest)?;
    Ok(manifest)
}
