use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::Parser;
use majorant::cli::{exit_status, run_file, Mode};

/// Sharp majorants of the first Dirichlet eigenvalue over weighted potential balls.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured mode (solve, extremal, oracle, bounds, perturb).
    #[arg(long, value_parser = |s: &str| Mode::from_str(s).map_err(|e| e.to_string()))]
    mode: Option<Mode>,
    /// Overrides the configured output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run_file(&args.config, args.mode, args.output_dir) {
        Ok(outcome) => {
            for note in &outcome.notes {
                eprintln!("{note}");
            }
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_status(&e) as u8)
        }
    }
}
