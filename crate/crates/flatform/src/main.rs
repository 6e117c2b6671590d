//! Command-line driver: parses flags, dispatches to the library suites,
//! prints the JSON report to standard output.
//!
//! Exit codes: 0 all checks pass, 1 a check failed or a precondition was
//! not met, 2 on input or parse errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flatform::commands;
use flatform::report::Report;

#[derive(Parser)]
#[command(name = "flatform", version, about = "Flat-form checks and diagonalization on model immersions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check flatness of a serialized bilinear form.
    CheckFlat {
        /// Path to the form file.
        path: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Diagonalize the form derived from a serialized α with J.
    Diagonalize {
        /// Path to the form file (must carry J).
        path: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the basis file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full battery on the extrinsic product of umbilical surfaces.
    ExampleSuite {
        /// Factor radii, first hyperbolic; reciprocal curvatures must sum to -1.
        #[arg(long, value_delimiter = ',', default_value = "2,1,1.4142135623730951")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Degenerate-span pipeline on the horosphere composition.
    HorosphereSuite {
        /// Number of complex dimensions (n >= 3).
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Algebraic identity sweep over seeded random instances.
    RandomSuite {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Domain half-dimension and Lorentzian dimension, as "n,p".
        #[arg(long, value_delimiter = ',', default_value = "3,3")]
        dims: Vec<usize>,
        /// Flip one tensor entry so the suite must fail.
        #[arg(long, default_value_t = false)]
        corrupt: bool,
    },
}

fn run() -> flatform::Result<Report> {
    let cli = Cli::parse();
    match cli.command {
        Command::CheckFlat { path, tol } => commands::cmd_check_flat(&path, tol),
        Command::Diagonalize { path, tol, seed, out } => {
            commands::cmd_diagonalize(&path, tol, seed, out.as_deref())
        }
        Command::ExampleSuite { radii, points, tol, seed } => {
            commands::cmd_example_suite(&radii, points, tol, seed)
        }
        Command::HorosphereSuite { n, points, tol, seed } => {
            commands::cmd_horosphere_suite(n, points, tol, seed)
        }
        Command::RandomSuite { trials, seed, dims, corrupt } => {
            if dims.len() != 2 {
                return Err(flatform::Error::InvalidInput("--dims expects \"n,p\"".into()));
            }
            commands::cmd_random_suite(trials, seed, (dims[0], dims[1]), corrupt)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(report) => {
            match report.to_json() {
                Ok(json) => println!("{json}"),
                Err(e) => {
                    eprintln!("failed to serialize report: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{{\"error\": \"{}\", \"message\": \"{}\"}}", e.reason(), e);
            ExitCode::from(2)
        }
    }
}
