//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 parse or usage error,
//! 3 solver error.

pub mod parse;
pub mod report;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::calculus::Lambda;
use crate::error::Error;
use crate::network::ValidateOptions;
use crate::solver::{lambda_sweep, propagate, solve_with, SolveOptions};

pub use parse::{parse_problem, serialize_problem, ParseError, ProblemFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "dsdecide", version, about = "Decision problems with belief-function uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a problem is well-defined
    Check {
        file: PathBuf,
        /// Also check that the potentials combine to a vacuous belief over the decisions
        #[arg(long)]
        joint: bool,
    },
    /// Compute the maximum expected value and an optimal strategy
    Solve {
        file: PathBuf,
        /// Weight of the best case when a random variable is deleted
        #[arg(long, value_parser = parse_lambda, allow_negative_numbers = true)]
        lambda: Option<Lambda>,
        /// Print one table per fusion step
        #[arg(long)]
        trace: bool,
        /// Tab-separated output
        #[arg(long)]
        machine: bool,
    },
    /// Solve for several weights
    Sweep {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', value_parser = parse_lambda, required = true, num_args = 1.., allow_negative_numbers = true)]
        lambdas: Vec<Lambda>,
        #[arg(long)]
        machine: bool,
    },
    /// Marginal belief function of one variable
    Marginal {
        file: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        machine: bool,
    },
}

fn parse_lambda(s: &str) -> Result<Lambda, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    Lambda::new(x).map_err(|e| e.to_string())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

pub fn load_problem(path: &Path) -> Result<ProblemFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut pf = parse_problem(&text).map_err(|e| format!("{}:{e}", path.display()))?;
    pf.path = Some(path.to_path_buf());
    Ok(pf)
}

fn solver_failure(err: Error) -> Outcome {
    let code = match err {
        Error::NotWellDefined(_) => EXIT_INVALID,
        _ => EXIT_SOLVER,
    };
    Outcome::fail(code, format!("error: {err}\n"))
}

/// Run the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::fail(EXIT_PARSE, text)
            } else {
                Outcome::ok(text)
            };
        }
    };
    let file = match &cli.command {
        Command::Check { file, .. }
        | Command::Solve { file, .. }
        | Command::Sweep { file, .. }
        | Command::Marginal { file, .. } => file,
    };
    let pf = match load_problem(file) {
        Ok(pf) => pf,
        Err(msg) => return Outcome::fail(EXIT_PARSE, format!("error: {msg}\n")),
    };
    match cli.command {
        Command::Check { joint, .. } => cmd_check(&pf, joint),
        Command::Solve {
            lambda, trace, machine, ..
        } => cmd_solve(&pf, lambda, trace, machine),
        Command::Sweep { lambdas, machine, .. } => cmd_sweep(&pf, &lambdas, machine),
        Command::Marginal { target, machine, .. } => cmd_marginal(&pf, &target, machine),
    }
}

pub fn cmd_check(pf: &ProblemFile, joint: bool) -> Outcome {
    let report = pf.network.validate_with(ValidateOptions { joint_check: joint });
    if report.is_empty() {
        Outcome::ok("well-defined\n".into())
    } else {
        Outcome::fail(EXIT_INVALID, report.to_string())
    }
}

fn effective_lambda(pf: &ProblemFile, flag: Option<Lambda>) -> Result<Lambda, Outcome> {
    match flag.or(pf.lambda) {
        Some(l) => Ok(l),
        None if pf.network.randoms().is_empty() => Ok(Lambda::PESSIMISTIC),
        None => Err(Outcome::fail(
            EXIT_PARSE,
            "error: no lambda given; pass --lambda or add 'lambda = <value>' to the file\n".into(),
        )),
    }
}

fn invalid(pf: &ProblemFile) -> Option<Outcome> {
    let report = pf.network.validate();
    (!report.is_empty()).then(|| Outcome::fail(EXIT_INVALID, report.to_string()))
}

pub fn cmd_solve(pf: &ProblemFile, lambda: Option<Lambda>, trace: bool, machine: bool) -> Outcome {
    let lambda = match effective_lambda(pf, lambda) {
        Ok(l) => l,
        Err(o) => return o,
    };
    if let Some(o) = invalid(pf) {
        return o;
    }
    match solve_with(&pf.network, lambda, SolveOptions { trace }) {
        Ok(result) => Outcome::ok(report::render_solve(pf.network.variables(), &result, machine)),
        Err(e) => solver_failure(e),
    }
}

pub fn cmd_sweep(pf: &ProblemFile, lambdas: &[Lambda], machine: bool) -> Outcome {
    if let Some(o) = invalid(pf) {
        return o;
    }
    let mut unique = lambdas.to_vec();
    unique.sort_by(|a, b| a.value().total_cmp(&b.value()));
    unique.dedup();
    let mut stderr = String::new();
    if unique.len() < lambdas.len() {
        let _ = writeln!(
            stderr,
            "note: {} duplicate lambda value(s) removed",
            lambdas.len() - unique.len()
        );
    }
    match lambda_sweep(&pf.network, &unique) {
        Ok(points) => Outcome {
            code: EXIT_OK,
            stdout: report::render_sweep(pf.network.variables(), &points, machine),
            stderr,
        },
        Err(e) => {
            let mut o = solver_failure(e);
            o.stderr.insert_str(0, &stderr);
            o
        }
    }
}

pub fn cmd_marginal(pf: &ProblemFile, target: &str, machine: bool) -> Outcome {
    let vars = pf.network.variables();
    let Some(var) = vars.find(target) else {
        return Outcome::fail(EXIT_SOLVER, format!("error: unknown variable '{target}'\n"));
    };
    if let Some(o) = invalid(pf) {
        return o;
    }
    match propagate(&pf.network, var) {
        Ok(v) => Outcome::ok(report::render_marginal(vars, target, &v, machine)),
        Err(e) => solver_failure(e),
    }
}
