//! Command-line front end: axiom suites, fixed-point demos, Fredholm solves
//! and Hadžić diagnostics, each producing a JSON report.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on a usage
//! or configuration error.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

pub mod config;
pub mod report;
pub mod suites;

pub use config::{parse_fredholm_config, ConfigError};
pub use report::{CheckEntry, Report, Status};

use suites::{FixedPointArgs, FredholmArgs, SpaceKind, TNormKind};

/// Invalid input: bad flags, unreadable or malformed configs, out-of-range
/// parameters. Maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<cstar_pm::Error> for UsageError {
    fn from(e: cstar_pm::Error) -> Self {
        Self(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "cstar-pm", version, about = "Probabilistic metric spaces over matrix cones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metric, distribution, t-norm and PM axiom checks on random samples.
    CheckAxioms {
        #[arg(long, value_enum, default_value = "trace")]
        space: SpaceKind,
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Distribution profiles, neighborhoods and sequence diagnostics.
    PmDemo {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Picard iteration for f(x, y) = (α₁ + λ₁x, α₂ + λ₂y).
    FixedPoint {
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "1,3")]
        alpha: (f64, f64),
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0.5,0.25")]
        lambda: (f64, f64),
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "100,-100")]
        start: (f64, f64),
        /// Random starts for the uniqueness probe.
        #[arg(long, default_value_t = 50)]
        starts: usize,
        /// Samples for the contraction check.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// 2×2 Fredholm systems of the second kind.
    Fredholm {
        #[command(subcommand)]
        action: FredholmAction,
    },
    /// Equicontinuity of the t-norm iterates at 1.
    Hadzic {
        #[arg(long, value_enum, default_value = "min")]
        tnorm: TNormKind,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.1,0.01,0.001")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum FredholmAction {
    /// Solve the problem described by a JSON config.
    Solve {
        config: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Samples for the D-contraction check.
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(format!("expected two comma-separated numbers, got `{s}`"));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(a)?, num(b)?))
}

/// Runs one parsed command and returns its report.
pub fn execute(command: &Command) -> Result<Report, UsageError> {
    let started = Instant::now();
    let mut report = match command {
        Command::CheckAxioms { space, trials, seed } => suites::check_axioms(*space, *trials as usize, *seed)?,
        Command::PmDemo { seed } => suites::pm_demo(*seed)?,
        Command::FixedPoint { alpha, lambda, start, starts, trials, seed } => suites::fixed_point(&FixedPointArgs {
            alpha: *alpha,
            lambda: *lambda,
            start: *start,
            starts: *starts,
            trials: *trials as usize,
            seed: *seed,
        })?,
        Command::Fredholm { action: FredholmAction::Solve { config, tol, max_iter, trials, seed } } => {
            suites::fredholm_solve(&FredholmArgs {
                config,
                tol: *tol,
                max_iter: *max_iter,
                trials: *trials as usize,
                seed: *seed,
            })?
        }
        Command::Hadzic { tnorm, epsilons, n_max } => suites::hadzic(*tnorm, epsilons, *n_max)?,
    };
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Parses `args`, runs the command, prints the summary and writes the
/// report. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };

    let to_stdout = cli.output.as_deref().is_some_and(|p| p.as_os_str() == "-");
    if to_stdout {
        eprint!("{}", report.summary());
        print!("{}", report.to_json());
    } else {
        print!("{}", report.summary());
        if let Some(path) = &cli.output {
            if let Err(e) = std::fs::write(path, report.to_json()) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
    }
    let _ = std::io::stdout().flush();
    report.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_parse() {
        assert_eq!(parse_pair("1,3"), Ok((1.0, 3.0)));
        assert_eq!(parse_pair("100, -100"), Ok((100.0, -100.0)));
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("1,x").is_err());
    }

    #[test]
    fn zero_trials_is_a_usage_error() {
        assert_eq!(run(["cstar-pm", "check-axioms", "--trials", "0"]), 2);
    }
}
