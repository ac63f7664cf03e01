use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wavelab_cli::{output_dir, run, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "wavelab", version, about = "Run a radial wave experiment from a JSON config")]
struct Cli {
    /// simulate | params | flux-check | morawetz-check | hardy-check | radiation | scatter |
    /// linear-scatter | decay-sweep | converge
    experiment: String,
    #[arg(long)]
    config: PathBuf,
    /// Exit with status 4 when any check fails
    #[arg(long)]
    assert: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("WAVELAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wavelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(&cli.config)?;
    let dir = output_dir(&cli.experiment, &cfg, cli.out.as_deref());
    let manifest = run(&cli.experiment, &cfg, &dir)?;
    println!("{} -> {} ({:.2} s)", cli.experiment, dir.display(), manifest.wall_time_s);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json"))?)
        .map_err(|e| CliError::Io(e.to_string()))?;
    for check in report["checks"].as_array().into_iter().flatten() {
        let status = if check["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
        println!("  {status} {} {}", check["name"].as_str().unwrap_or(""), check["detail"].as_str().unwrap_or(""));
    }
    if cli.assert && manifest.checks_failed > 0 {
        return Err(CliError::ChecksFailed(manifest.checks_failed));
    }
    Ok(())
}
