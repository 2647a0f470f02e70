use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use subdiff_harness::config::{StudyConfig, StudyKind};
use subdiff_harness::{par, run, Artifact};

/// Convergence studies and verification suites for the L1 subdiffusion
/// solver. Studies emit CSV, suites emit JSON (plus a CSV side file where
/// per-cell data exists). Exit codes: 0 success, 1 verification failure,
/// 2 configuration error, 3 solver failure.
#[derive(Parser)]
#[command(name = "subdiff", version, about)]
struct Cli {
    /// Study or suite to run.
    #[arg(long, value_enum)]
    study: Option<StudyKind>,

    /// JSON config overlaying the study defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output path for the primary artifact (stdout when absent). Suites
    /// with CSV side-products write them next to it with a .csv extension.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads for sweep cells (0 = all cores). Results are
    /// byte-identical regardless; 1 also serializes the schedule.
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Reserved for future randomized studies; accepted and recorded only.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match StudyConfig::load(cli.config.as_deref(), cli.study) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if cli.out.is_some() {
        config.out = cli.out;
    }
    config.seed = cli.seed;

    let outcome = par::with_threads(cli.threads, || run(&config));
    let output = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    let primary_text = match &output.primary {
        Artifact::Csv(s) | Artifact::Json(s) => s,
    };
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, primary_text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            if let Some(csv) = &output.side_csv {
                let side = path.with_extension("csv");
                if side != *path {
                    if let Err(e) = std::fs::write(&side, csv) {
                        eprintln!("cannot write {}: {e}", side.display());
                        return ExitCode::from(2);
                    }
                }
            }
        }
        None => print!("{primary_text}"),
    }
    ExitCode::SUCCESS
}
