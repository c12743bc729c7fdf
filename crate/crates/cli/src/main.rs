//! Command-line front end: parameter parsing, sweep orchestration, and
//! stable CSV/JSON emission for the library's computations.

mod commands;
mod config;
mod emit;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "miphase",
    version,
    about = "Measurement-induced phases of a weakly measured qubit",
    after_help = "Angles are radians and accept a `pi` suffix (e.g. 0.75pi). \
                  A config file holds `key = value` lines matching the long \
                  option names; command-line options win."
)]
struct Cli {
    /// Key-value file supplying defaults for the chosen command's options.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output path (stdout if omitted); files are written atomically.
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for sweeps (default: MIPHASE_WORKERS or all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Postselected amplitude sqrt(P) e^{i chi} (closed form, or finite N).
    Postselected {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        /// Number of weak measurements; omit for the scaling limit.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Averaged phase factor e^{2i chibar - alpha}.
    Averaged {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        /// Finite-N route: transfer or brute-force (N <= 20).
        #[arg(long)]
        method: Option<String>,
    },
    /// Winding number of the continuous phase branch over theta.
    Winding {
        #[arg(long)]
        protocol: Option<String>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        /// Initial uniform grid for the adaptive tracer.
        #[arg(long)]
        grid: Option<usize>,
        /// Emit the traced curve (theta, re, im, phase_unwrapped, magnitude)
        /// instead of the one-row summary.
        #[arg(long)]
        emit_curve: bool,
    },
    /// Sweep one or two parameters and emit long-format rows.
    PhaseDiagram {
        /// Quantity per grid cell: phase | prob | log-p | chi-bar | alpha |
        /// winding | averaged-winding.
        #[arg(long)]
        quantity: Option<String>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        /// Swept variable: --sweep VAR MIN MAX STEPS (up to twice).
        #[arg(long, num_args = 4, action = clap::ArgAction::Append, value_names = ["VAR", "MIN", "MAX", "STEPS"], allow_hyphen_values = true)]
        sweep: Vec<String>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Critical line: analytic (postselected) or scanned (averaged).
    CriticalLine {
        #[arg(long)]
        protocol: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        /// Points on the analytic line, or asymmetry samples for the
        /// averaged scan.
        #[arg(long)]
        points: Option<usize>,
        /// Largest asymmetry scanned in the averaged search.
        #[arg(long)]
        a_max: Option<f64>,
    },
    /// Bloch trajectory rows (theta, k, x, y, z) of the all-zeros record.
    Trajectory {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        /// Readout bits as a 0/1 string of length N (default all zeros).
        #[arg(long)]
        readouts: Option<String>,
        /// Trace a family: --sweep theta MIN MAX STEPS.
        #[arg(long, num_args = 4, action = clap::ArgAction::Append, value_names = ["VAR", "MIN", "MAX", "STEPS"], allow_hyphen_values = true)]
        sweep: Vec<String>,
    },
    /// Monte Carlo estimate of the averaged phase factor.
    Montecarlo {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        /// Number of sampled readout sequences.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Detector-screen intensities of the interferometric setups.
    Interferometer {
        /// postselected (single-arm) or averaged (two-arm) setup.
        #[arg(long)]
        setup: Option<String>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        /// Input beam intensity.
        #[arg(long)]
        i0: Option<f64>,
    },
    /// Finite-detector scaling run g = C' n^-a, theta_D = pi/2 - A' n^-b.
    Scaling {
        #[arg(long)]
        a_exp: Option<f64>,
        #[arg(long)]
        b_exp: Option<f64>,
        #[arg(long)]
        c_prime: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a_prime: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        #[arg(long)]
        n: Option<u64>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid arguments: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let workers = cli
        .workers
        .or_else(|| std::env::var("MIPHASE_WORKERS").ok().and_then(|s| s.parse().ok()));
    if let Some(n) = workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let cfg = match &cli.config {
        Some(path) => match config::KvConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("invalid arguments: {e}");
                return ExitCode::from(2);
            }
        },
        None => config::KvConfig::empty(),
    };

    let format = cli.format.unwrap_or_else(|| {
        match cfg.get("format") {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        }
    });
    let output = cli
        .output
        .clone()
        .or_else(|| cfg.get("output").map(PathBuf::from));

    match commands::run(&cli.command, &cfg) {
        Ok(outcome) => {
            let bytes = match format {
                Format::Csv => outcome.table.to_csv(),
                Format::Json => outcome.json.unwrap_or_else(|| outcome.table.to_json()),
            };
            match &output {
                Some(path) => {
                    if let Err(e) = emit::write_atomic(path, bytes.as_bytes()) {
                        eprintln!("io error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                    println!("{} -> {}", outcome.summary, path.display());
                }
                None => {
                    print!("{bytes}");
                    eprintln!("{}", outcome.summary);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
