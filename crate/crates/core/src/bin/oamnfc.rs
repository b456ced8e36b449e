use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oamnfc::cli::{self, EvaluateOptions};
use oamnfc::config::SimulationConfig;
use oamnfc::Error;

/// OAM-multiplexed near-field link simulator.
///
/// Set OAMNFC_WORKERS to limit sweep worker threads.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// TOML simulation config (defaults to the baseline link).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file, or directory for `channel`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo bits per point; accepts forms like 1e6.
    #[arg(long, global = true, value_parser = parse_count)]
    trials: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump H, M, Mt and, when possible, the reduced and mode-domain channel.
    Channel,
    /// Capacity and BER of every scheme over the config's SNR grid.
    Evaluate {
        /// Add the closed-form lower and upper capacity bounds.
        #[arg(long)]
        bounds: bool,
    },
    /// Run a named recipe or a TOML sweep spec.
    Sweep { target: String },
    /// Evaluate the channel in an S-parameter CSV document.
    #[command(name = "import-s")]
    ImportS { file: PathBuf },
}

fn parse_count(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("'{s}' is not a non-negative integer"))
    }
}

/// Exit code on success: 0, or 3 when some metric could not be computed.
fn run(args: Args) -> Result<u8, Error> {
    let cfg = match &args.config {
        Some(p) => Some(SimulationConfig::load(p)?),
        None => None,
    };
    let resolved = cfg.clone().unwrap_or_default();
    let seed = args.seed.unwrap_or(0);
    match args.command {
        Command::Channel => {
            let dir = args.out.unwrap_or_else(|| PathBuf::from("channel"));
            let d = cli::cmd_channel(&resolved, &dir)?;
            println!("H is {}x{}", d.shape.0, d.shape.1);
            if let Some(r) = d.circulant_residual {
                println!("circulant residual {r:e}");
            }
            if let Some(n) = d.notice {
                println!("{n}");
            }
            println!("condition number {:e}", d.condition);
            for f in d.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Evaluate { bounds } => {
            let r = cli::cmd_evaluate(&resolved, &EvaluateOptions { bounds, trials: args.trials, seed })?;
            print!("{}", r.to_text());
            if let Some(p) = args.out {
                std::fs::write(&p, r.to_csv())?;
            }
            return Ok(report_failures(&r.failures()));
        }
        Command::Sweep { target } => {
            let out = args.out.unwrap_or_else(|| {
                let stem = PathBuf::from(&target).file_stem().map(|s| s.to_string_lossy().into_owned());
                PathBuf::from(format!("{}.csv", stem.unwrap_or_else(|| target.clone())))
            });
            let r = cli::cmd_sweep(&target, cfg.as_ref(), args.seed, args.trials, Some(&out), |done, total| {
                if done == total || done % 64 == 0 {
                    eprint!("\r{done}/{total} points");
                    let _ = std::io::stderr().flush();
                }
            })?;
            eprintln!();
            println!("{} rows, {} skipped, wrote {}", r.rows.len(), r.skipped().count(), out.display());
        }
        Command::ImportS { file } => {
            let r = cli::cmd_import_s(&file, &resolved, seed)?;
            print!("{}", r.to_text());
            if let Some(p) = args.out {
                std::fs::write(&p, r.to_csv())?;
            }
            return Ok(report_failures(&r.failures()));
        }
    }
    Ok(0)
}

fn report_failures(notes: &[String]) -> u8 {
    for n in notes {
        eprintln!("{n}");
    }
    if notes.is_empty() {
        0
    } else {
        3
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e))
        }
    }
}
