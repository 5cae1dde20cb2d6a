//! `primavoid`: verification sweeps, exception scan and witness search.
//!
//! Exit codes: 0 success, 1 not found, 2 mismatch or violation, 3 incomplete
//! (unknown pairs or an exhausted budget), 4 invalid input.

mod commands;
mod render;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use primavoid::bounds::Precision;
use primavoid::ntheory::{FactorBudget, FactorCache};
use primavoid::Error;

use render::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "primavoid", version, about = "Primitive elements avoiding affine hyperplanes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Factor cache file; the bundled cache is used when absent.
    #[arg(long, global = true, env = "PRIMAVOID_FACTOR_CACHE")]
    cache: Option<PathBuf>,
    /// Use no cache at all.
    #[arg(long, global = true, conflicts_with = "cache")]
    no_cache: bool,
    /// Trial division bound for blind factoring.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    trial_bound: u32,
    /// Modular multiplications allowed in Pollard rho.
    #[arg(long, global = true, default_value_t = 1_000_000_000)]
    max_mulmods: u64,
    /// Largest working precision, in bits, for interval decisions.
    #[arg(long, global = true, default_value_t = 4096)]
    precision_cap: u32,
    /// Largest set enumerated exhaustively.
    #[arg(long, global = true, default_value_t = 1 << 26)]
    enumeration_limit: u64,
}

impl Global {
    pub fn budget(&self) -> FactorBudget {
        FactorBudget {
            trial_bound: self.trial_bound,
            max_mulmods: self.max_mulmods,
        }
    }

    pub fn precision(&self) -> Precision {
        Precision {
            start_bits: 64.min(self.precision_cap),
            max_bits: self.precision_cap,
        }
    }

    pub fn load_cache(&self) -> primavoid::Result<Option<FactorCache>> {
        if self.no_cache {
            return Ok(None);
        }
        Ok(Some(match &self.cache {
            Some(p) => FactorCache::load(p)?,
            None => FactorCache::shipped()?,
        }))
    }
}

#[derive(Args, Debug, Clone)]
pub struct Target {
    /// Field descriptor p^m^n, for F_{(p^m)^n}.
    #[arg(long)]
    field: String,
    /// Digit constants c_1,...,c_n; a single value is used for every digit.
    #[arg(long, conflicts_with = "arrangement")]
    constants: Option<String>,
    /// Hyperplanes `[a_1,...,a_n] = c` separated by `;`.
    #[arg(long)]
    arrangement: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every character sum bound over digit subspaces and random arrangements.
    VerifyCharsums {
        #[arg(long)]
        field: String,
        /// Random general-position arrangements to test.
        #[arg(long, alias = "arrangements-count", default_value_t = 20)]
        arrangements: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Count primitive elements in the avoided set.
    Count(Target),
    /// Scan the pairs outside the threshold table for exceptions.
    Scan {
        /// Only this q.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Search for a primitive element avoiding the arrangement.
    Witness {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        max_draws: u64,
    },
    /// Evaluate the F-bound at the threshold table corners and their neighbours.
    Table1,
    /// Place (q, n) in the case analysis.
    Classify {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
    },
    /// Where the W-bound starts to hold, for n up to a limit.
    Threshold {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 100)]
        limit: u32,
    },
    /// Inspect a factor cache.
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Subcommand, Debug)]
enum CacheCommand {
    /// Re-verify every entry.
    Verify,
    /// Entry counts and sizes.
    Stats,
}

/// Exit code for a library error.
fn failure_code(e: &Error) -> u8 {
    match e {
        Error::NotFound { .. } => 1,
        Error::BoundViolated(_) => 2,
        Error::FactoringTimeout { .. }
        | Error::OrderTooLarge { .. }
        | Error::PrecisionExhausted { .. }
        | Error::NoLogTable => 3,
        _ => 4,
    }
}

fn run(cli: &Cli) -> primavoid::Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::VerifyCharsums {
            field,
            arrangements,
            seed,
        } => commands::verify_charsums(g, field, *arrangements, *seed),
        Command::Count(t) => commands::count(g, t),
        Command::Scan { q } => commands::scan(g, *q),
        Command::Witness {
            target,
            seed,
            max_draws,
        } => commands::witness(g, target, *seed, *max_draws),
        Command::Table1 => commands::table1(g),
        Command::Classify { q, n } => commands::classify(g, *q, *n),
        Command::Threshold { q, limit } => commands::threshold(g, *q, *limit),
        Command::Cache(CacheCommand::Verify) => commands::cache_verify(g),
        Command::Cache(CacheCommand::Stats) => commands::cache_stats(g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(failure_code(&e));
        }
    };
    let written = match &cli.global.output {
        Some(p) => File::create(p).and_then(|mut f| report.write(cli.global.format, &mut f)),
        None => {
            let mut out = io::stdout().lock();
            report.write(cli.global.format, &mut out).and_then(|_| out.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(4);
    }
    ExitCode::from(report.exit as u8)
}
