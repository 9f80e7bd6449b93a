//! Command-line front end: run configured cases, execute validation suites,
//! and tabulate internal-energy domain extents.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use frbgk::config::parse_config;
use frbgk::phase::compute_zeta_max;
use frbgk::runner::{run_case, run_with_threads};
use frbgk::validate;

#[derive(Parser)]
#[command(name = "solver", about = "1D Boltzmann-BGK flux reconstruction solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured case and write CSV artifacts.
    Run {
        /// Path to a flat `key = value` config file.
        config: PathBuf,
        /// Output directory (default: ./out_<case>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = all cores); overrides the config.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a validation suite and write a JSON-lines report.
    Validate {
        /// One of: zeta_table, pulse_convergence, dvm_conservation, sod,
        /// expansion, normal_shock.
        suite: String,
        /// Report directory (default: ./validate_<suite>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Print the internal-energy domain extent zeta_max / theta_max.
    TabulateZeta {
        /// Internal degrees of freedom.
        #[arg(long)]
        delta: f64,
        /// Truncation tolerance.
        #[arg(long)]
        eps: f64,
        /// Maximum scaled temperature (default 1).
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> frbgk::Result<bool> {
    match cli.command {
        Command::Run {
            config,
            out,
            threads,
        } => {
            let mut cfg = parse_config(&config)?;
            if let Some(t) = threads {
                cfg.threads = t;
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from(format!("out_{}", cfg.case.as_str())));
            let summary = run_case(&cfg, &out_dir)?;
            println!(
                "run complete: {} steps, final residual {:.3e}, artifacts in {}",
                summary.log.steps,
                summary.log.final_residual,
                summary.out_dir.display()
            );
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            Ok(true)
        }
        Command::Validate {
            suite,
            out,
            threads,
        } => {
            let report = run_with_threads(threads, || validate::run_suite(&suite))??;
            print!("{}", report.render());
            let out_dir = out.unwrap_or_else(|| PathBuf::from(format!("validate_{suite}")));
            std::fs::create_dir_all(&out_dir)?;
            let path = out_dir.join("report.jsonl");
            std::fs::write(&path, report.jsonl())?;
            println!("report: {}", path.display());
            Ok(report.passed())
        }
        Command::TabulateZeta { delta, eps, theta } => {
            let z = compute_zeta_max(delta, eps, theta)?;
            println!("{z:.6}");
            Ok(true)
        }
    }
}
