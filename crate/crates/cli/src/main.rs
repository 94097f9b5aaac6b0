use std::path::PathBuf;
use std::process::ExitCode;

use bakerdim::{run_scenario, CliError, ExperimentConfig, Scenario};
use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "bakerdim", version, about = "Dimension experiments on coupled skinny baker's maps")]
struct Args {
    /// cross-section | sweep | prevalence | counterexample | lyapunov | dimension
    scenario: Scenario,
    /// TOML config file
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = ExperimentConfig::load(&args.config)
        .and_then(|cfg| run_scenario(args.scenario, cfg, args.seed, &args.out, args.threads));
    match result {
        Ok(m) => {
            for c in &m.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("manifest: {}", args.out.join(bakerdim::manifest::MANIFEST_FILE).display());
            if m.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e @ CliError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
