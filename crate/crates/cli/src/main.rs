//! `erdoslab`: runs one experiment per invocation, writes its CSV (and an
//! optional JSON mirror) and prints the run manifest on stdout.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid arguments, 3 resource
//! budget exceeded.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use erdoslab_core::LabError;

use commands::*;
use output::{write_artifacts, RunManifest};

const THREADS_ENV: &str = "ERDOSLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "erdoslab", version, about = "Consecutive-value statistics of arithmetic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// CSV output path (defaults to `<subcommand>.csv`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON mirror of the CSV.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads; the ERDOSLAB_THREADS environment variable takes precedence.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prime-sum constants B1..B6 and the two reciprocal-square sums.
    Constants {
        #[command(flatten)]
        a: ConstantsArgs,
        #[command(flatten)]
        c: Common,
    },
    /// Densities of f(n) = f(n+1) on the x grid, normalized and imputed B.
    Scan {
        #[command(flatten)]
        a: ScanArgs,
        #[command(flatten)]
        c: Common,
    },
    /// Histograms of f(n+1) - f(n) with Gaussian predictions.
    Hist {
        #[command(flatten)]
        a: HistArgs,
        #[command(flatten)]
        c: Common,
    },
    /// Empirical, Monte Carlo and lower-bound estimates of the tau-equality density.
    Ctau {
        #[command(flatten)]
        a: CtauArgs,
        #[command(flatten)]
        c: Common,
    },
    /// Exact distribution of the prime-indexed random walk against its Gaussian.
    Llt {
        #[command(flatten)]
        a: LltArgs,
        #[command(flatten)]
        c: Common,
    },
    /// Densities of consecutive smooth pairs against Dickman products.
    Smooth {
        #[command(flatten)]
        a: SmoothArgs,
        #[command(flatten)]
        c: Common,
    },
    /// Shifted two-point correlation of multiplicative functions.
    Corr {
        #[command(flatten)]
        a: CorrArgs,
        #[command(flatten)]
        c: Common,
    },
    /// Omega barriers and the tau(n-k) <= k+2 scan.
    Barriers {
        #[command(flatten)]
        a: BarriersArgs,
        #[command(flatten)]
        c: Common,
    },
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| format!("{THREADS_ENV}={v:?} is not a positive integer")),
        Err(_) => Ok(flag.filter(|&n| n > 0)),
    }
}

fn run(cli: Cli) -> ExitCode {
    let (name, common) = match &cli.command {
        Command::Constants { c, .. } => ("constants", c),
        Command::Scan { c, .. } => ("scan", c),
        Command::Hist { c, .. } => ("hist", c),
        Command::Ctau { c, .. } => ("ctau", c),
        Command::Llt { c, .. } => ("llt", c),
        Command::Smooth { c, .. } => ("smooth", c),
        Command::Corr { c, .. } => ("corr", c),
        Command::Barriers { c, .. } => ("barriers", c),
    };
    match threads(common.threads) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: cannot start thread pool: {e}");
                return ExitCode::from(1);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    let mut manifest = RunManifest::new(name);
    let table = match &cli.command {
        Command::Constants { a, .. } => constants(a, &mut manifest),
        Command::Scan { a, .. } => scan_cmd(a, &mut manifest),
        Command::Hist { a, .. } => hist(a, &mut manifest),
        Command::Ctau { a, .. } => ctau(a, &mut manifest),
        Command::Llt { a, .. } => llt(a, &mut manifest),
        Command::Smooth { a, .. } => smooth(a, &mut manifest),
        Command::Corr { a, .. } => corr(a, &mut manifest),
        Command::Barriers { a, .. } => barriers(a, &mut manifest),
    };
    let table = match table {
        Ok(t) => t,
        Err(e @ LabError::Budget { .. }) => {
            eprintln!("error: resource budget exceeded: {e}");
            return ExitCode::from(3);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let out = common.out.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    if let Err(e) = write_artifacts(&table, &mut manifest, &out, common.json.as_deref()) {
        eprintln!("error: cannot write artifacts: {e}");
        return ExitCode::from(1);
    }
    match serde_json::to_string(&manifest) {
        Ok(s) => println!("{s}"),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        // Help and version requests exit 0, usage errors exit 2.
        Err(e) => {
            let _ = e.print();
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
