//! Command-line parsing and exit codes: 0 pass, 1 failed check, 2 error.

use clap::{Parser, Subcommand};

use prismalab_core::suites::{run_suites, DEFAULT_SEED};
use prismalab_core::{Error, Result};

use crate::checks::{cyclo_example, run_document, Options};
use crate::doc::{parse, serialize};
use crate::report;

/// Environment variable adding p-adic digits to internal precision.
pub const SLACK_VAR: &str = "PRISMALAB_PRECISION_SLACK";

#[derive(Parser, Debug)]
#[command(name = "prismalab", version, about = "Exact semilinear algebra over p-adic series rings")]
pub struct Cli {
    /// Emit a JSON document instead of key = value text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized checks and suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override the prime.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Override the p-adic precision (or the cyclotomic level).
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Override the residue degree.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Override the residue field polynomial, `c0,c1,...,1`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub f: Option<Vec<u64>>,
    /// u-adic truncation for well-definedness checks.
    #[arg(long = "N", global = true)]
    pub n_trunc: Option<usize>,
    /// Divided-power degree for the ideal J.
    #[arg(long = "D", global = true)]
    pub dp_degree: Option<usize>,
    /// Degree bound for the kernel of phi - d.
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a named check (or every [check] entry) on a module file.
    Check { path: String, name: Option<String> },
    /// Print the canonical form of a module file.
    Canon { path: String },
    /// Worked examples.
    Example {
        #[command(subcommand)]
        which: Example,
    },
    /// Run built-in suites: all, cyclo, split, zp, fl, etale, residual, boundary.
    Suite {
        #[arg(default_value = "all")]
        filter: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum Example {
    /// The cyclotomic instance at level n (defaults p = 2, n = 1).
    Cyclo,
}

fn slack() -> Result<u32> {
    match std::env::var(SLACK_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Error::BadRing(format!("{SLACK_VAR} must be a nonnegative integer"))),
        Err(_) => Ok(0),
    }
}

fn options(cli: &Cli) -> Result<Options> {
    Ok(Options { seed: cli.seed, n_trunc: cli.n_trunc, dp_degree: cli.dp_degree, bound: cli.bound, slack: slack()? })
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::ParseError { line: 0, col: 0, msg: format!("{path}: {e}") })
}

/// Exit code and output for a parsed command line.
pub fn execute(cli: &Cli) -> (i32, String) {
    match try_execute(cli) {
        Ok(v) => v,
        Err(e) if cli.json => (2, format!("{}\n", report::error_json(&e))),
        Err(e) => (2, format!("error [{}]: {e}\n", report::error_kind(&e))),
    }
}

fn try_execute(cli: &Cli) -> Result<(i32, String)> {
    let opts = options(cli)?;
    let code = |passed: bool| if passed { 0 } else { 1 };
    match &cli.command {
        Command::Check { path, name } => {
            let mut doc = parse(&read(path)?)?;
            if let Some(p) = cli.p {
                doc.ring.p = p;
            }
            if let Some(n) = cli.n {
                doc.ring.n = n;
            }
            if let Some(m) = cli.m {
                doc.ring.m = m;
            }
            if let Some(f) = &cli.f {
                doc.ring.m = f.len().saturating_sub(1);
                doc.ring.f = Some(f.clone());
            }
            let outcomes = run_document(&doc, name.as_deref(), &opts)?;
            let passed = outcomes.iter().all(|o| o.passed);
            let out = if cli.json {
                format!("{}\n", report::outcomes_json(&outcomes))
            } else {
                outcomes.iter().map(report::outcome_text).collect()
            };
            Ok((code(passed), out))
        }
        Command::Canon { path } => Ok((0, serialize(&parse(&read(path)?)?))),
        Command::Example { which: Example::Cyclo } => {
            let o = cyclo_example(cli.p.unwrap_or(2), cli.n.unwrap_or(1), &opts)?;
            let out = if cli.json { format!("{}\n", o.to_json()) } else { report::outcome_text(&o) };
            Ok((code(o.passed), out))
        }
        Command::Suite { filter } => {
            let reports = run_suites(filter, cli.seed.unwrap_or(DEFAULT_SEED))?;
            let passed = reports.iter().all(|r| r.passed());
            let out = if cli.json {
                format!("{}\n", report::suites_json(&reports))
            } else {
                reports.iter().map(report::suite_text).collect()
            };
            Ok((code(passed), out))
        }
    }
}

pub fn main_from_env() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (code, out) = execute(&cli);
    if code == 2 && !cli.json {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    code
}
