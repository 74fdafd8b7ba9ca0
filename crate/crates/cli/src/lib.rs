//! Command-line front end: reads a problem file, runs one engine and prints
//! a JSON report. Exit codes: 0 certified or check passed, 1 refuted or
//! violation found, 2 inapplicable, 3 input error.

pub mod problem;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use revcert_core::certificates::{recheck_record, recheck_witness};
use revcert_core::oracle::GridSpec;
use revcert_core::pareto::{bridge_check, eff_set, ParetoSample, SigmaKind};
use revcert_core::{
    brute_eps_argmin, falsify, subdiff_vrep, verify, CertificateVerdict, EpsPrimeSweep, Mode,
    OracleMode, ReverseProblem, Scalar, SubdiffQuery, VerdictStatus,
};

pub use problem::ProblemFile;
pub use report::{
    cross_check, BruteReport, CrossCheck, ParetoReport, ReplayReport, Report, SubdiffReport,
    VerifyReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INAPPLICABLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] revcert_core::Error),

    #[error("{0}")]
    Usage(String),
}

/// What a finished command hands back to the process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Parser)]
#[command(name = "revcert", version, about = "Exact ε-optimality certificates for reverse convex programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide the optimality criterion on an ε′ sweep.
    Verify(VerifyArgs),
    /// Search for a refutation on the dense ε′ sweep.
    Falsify(FalsifyArgs),
    /// Vertices and rays of the ε-subdifferential of one problem function at x̄.
    Subdiff(SubdiffArgs),
    /// Brute-force grid ε-argmin.
    Brute(BruteArgs),
    /// Bicriteria scan of x ↦ (f(x), -h(x)) on a grid.
    Pareto(ParetoArgs),
    /// Re-validate every certificate stored in a verify or falsify report.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub mode: Mode,
    /// Comma-separated ε′ values replacing the default sweep.
    #[arg(long, value_delimiter = ',')]
    pub eps_prime: Option<Vec<Scalar>>,
    /// Oracle box bounds and step: L U STEP.
    #[arg(long, num_args = 3, value_names = ["L", "U", "STEP"], allow_hyphen_values = true)]
    pub cross_check_grid: Option<Vec<Scalar>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FalsifyArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SubdiffArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// objective, reverse or constraint:J.
    #[arg(long = "fn")]
    pub function: FunctionRef,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Scalar,
}

#[derive(Debug, Args)]
pub struct BruteArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub mode: OracleMode,
    #[arg(long = "box", num_args = 2, value_names = ["L", "U"], allow_hyphen_values = true)]
    pub bounds: Vec<Scalar>,
    #[arg(long)]
    pub step: Scalar,
}

#[derive(Debug, Args)]
pub struct ParetoArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long = "box", num_args = 2, value_names = ["L", "U"], allow_hyphen_values = true)]
    pub bounds: Vec<Scalar>,
    #[arg(long)]
    pub step: Scalar,
    #[arg(long, default_value = "e")]
    pub sigma: SigmaKind,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
}

/// A problem function named on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionRef {
    Objective,
    Reverse,
    Constraint(usize),
}

impl FromStr for FunctionRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "objective" => Ok(FunctionRef::Objective),
            "reverse" => Ok(FunctionRef::Reverse),
            _ => s
                .strip_prefix("constraint:")
                .and_then(|j| j.parse().ok())
                .map(FunctionRef::Constraint)
                .ok_or_else(|| format!("expected objective, reverse or constraint:J, found `{s}`")),
        }
    }
}

impl std::fmt::Display for FunctionRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionRef::Objective => write!(f, "objective"),
            FunctionRef::Reverse => write!(f, "reverse"),
            FunctionRef::Constraint(j) => write!(f, "constraint:{j}"),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok((code, report)) => Outcome {
            code,
            stdout: report.to_json(),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Runs one parsed command, returning its exit code and report.
pub fn execute(command: &Command) -> Result<(i32, Report), CliError> {
    match command {
        Command::Verify(a) => {
            let problem = load_problem(&a.problem)?;
            let sweep = match &a.eps_prime {
                Some(values) => EpsPrimeSweep::explicit(values.clone())?,
                None => EpsPrimeSweep::default_for(problem.epsilon(), a.seed),
            };
            let verdict = verify(&problem, a.mode, &sweep)?;
            let cross = match &a.cross_check_grid {
                Some(g) => {
                    let grid = GridSpec::cube(problem.dim(), g[0].clone(), g[1].clone(), g[2].clone())?;
                    Some(cross_check(&problem, &verdict, &grid)?)
                }
                None => None,
            };
            let code = verdict_code(&verdict);
            Ok((
                code,
                Report::Verify(VerifyReport {
                    seed: a.seed,
                    verdict,
                    cross_check: cross,
                }),
            ))
        }
        Command::Falsify(a) => {
            let problem = load_problem(&a.problem)?;
            let verdict = falsify(&problem, a.mode, a.seed)?;
            let code = verdict_code(&verdict);
            Ok((
                code,
                Report::Falsify(VerifyReport {
                    seed: a.seed,
                    verdict,
                    cross_check: None,
                }),
            ))
        }
        Command::Subdiff(a) => {
            let problem = load_problem(&a.problem)?;
            let function = match a.function {
                FunctionRef::Objective => problem.objective(),
                FunctionRef::Reverse => problem.reverse(),
                FunctionRef::Constraint(j) => problem.constraints().get(j).ok_or_else(|| {
                    CliError::Usage(format!(
                        "constraint:{j} does not exist; the problem has {} constraints",
                        problem.constraints().len()
                    ))
                })?,
            };
            let q = SubdiffQuery::new(function.clone(), problem.point().to_vec(), a.eps.clone())?;
            let polytope = subdiff_vrep(&q)?;
            Ok((
                EXIT_OK,
                Report::Subdiff(SubdiffReport {
                    function: a.function.to_string(),
                    point: problem.point().to_vec(),
                    eps: a.eps.clone(),
                    bounded: polytope.is_bounded(),
                    subdifferential: polytope,
                }),
            ))
        }
        Command::Brute(a) => {
            let problem = load_problem(&a.problem)?;
            let grid = GridSpec::cube(problem.dim(), a.bounds[0].clone(), a.bounds[1].clone(), a.step.clone())?;
            let result = brute_eps_argmin(&problem, a.mode, &grid)?;
            let candidate_value = problem.objective().value(problem.point());
            let improving_point = match (&candidate_value, &result.min_value) {
                (Some(fx), Some(min)) if *min < fx - problem.epsilon() => result
                    .eps_argmin
                    .iter()
                    .find(|g| &g.value == min)
                    .map(|g| g.point.clone()),
                _ => None,
            };
            let code = if improving_point.is_some() {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            };
            Ok((
                code,
                Report::Brute(BruteReport {
                    candidate_value,
                    improving_point,
                    result,
                }),
            ))
        }
        Command::Pareto(a) => {
            let problem = load_problem(&a.problem)?;
            let grid = GridSpec::cube(problem.dim(), a.bounds[0].clone(), a.bounds[1].clone(), a.step.clone())?;
            let (f, h) = (problem.objective(), problem.reverse());
            let points = grid.points();
            let images = points
                .iter()
                .map(|x| Some(vec![f.value(x)?, -h.value(x)?]))
                .collect();
            let sample = ParetoSample::new(2, points, images)?;
            let eps = vec![problem.epsilon().clone(), Scalar::zero()];
            let selected = eff_set(&sample, &eps, a.sigma)?
                .into_iter()
                .map(|i| sample.points()[i].clone())
                .collect();
            let bridge = bridge_check(f, h, &grid, problem.epsilon())?;
            let violations = bridge.violations();
            let code = if violations > 0 { EXIT_VIOLATION } else { EXIT_OK };
            Ok((
                code,
                Report::Pareto(ParetoReport {
                    sigma: a.sigma,
                    eps,
                    grid,
                    selected,
                    bridge,
                    violations,
                }),
            ))
        }
        Command::Replay(a) => {
            let problem = load_problem(&a.problem)?;
            let text = read(&a.report)?;
            let (replayed, stored) = match serde_json::from_str::<Report>(&text)? {
                Report::Verify(r) => ("verify", r),
                Report::Falsify(r) => ("falsify", r),
                _ => {
                    return Err(CliError::Usage(
                        "only verify and falsify reports carry certificates to replay".into(),
                    ))
                }
            };
            let report = replay(&problem, replayed, &stored.verdict)?;
            let code = if report.valid { EXIT_OK } else { EXIT_VIOLATION };
            Ok((code, Report::Replay(report)))
        }
    }
}

/// Re-validates every logged check and the witness of `verdict`.
pub fn replay(problem: &ReverseProblem, replayed: &str, verdict: &CertificateVerdict) -> Result<ReplayReport, CliError> {
    let mut failed_checks = Vec::new();
    for (i, record) in verdict.log.iter().enumerate() {
        if !recheck_record(problem, verdict.mode, record)? {
            failed_checks.push(i);
        }
    }
    let witness_valid = match &verdict.witness {
        Some(w) => Some(recheck_witness(problem, verdict.mode, w)?),
        None => None,
    };
    let status_matches = match verdict.status {
        VerdictStatus::Refuted => witness_valid == Some(true),
        VerdictStatus::CertifiedOnGrid => verdict.witness.is_none() && verdict.log.iter().all(|r| r.accepted),
        VerdictStatus::Inapplicable => verdict.witness.is_none() && verdict.reason.is_some(),
    };
    let valid = failed_checks.is_empty() && status_matches;
    Ok(ReplayReport {
        replayed: replayed.to_string(),
        checks: verdict.log.len(),
        failed_checks,
        witness_valid,
        valid,
    })
}

/// The exit code of a verdict; nothing else in the report affects it.
pub fn verdict_code(verdict: &CertificateVerdict) -> i32 {
    match verdict.status {
        VerdictStatus::CertifiedOnGrid => EXIT_OK,
        VerdictStatus::Refuted => EXIT_VIOLATION,
        VerdictStatus::Inapplicable => EXIT_INAPPLICABLE,
    }
}

pub fn load_problem(path: &Path) -> Result<ReverseProblem, CliError> {
    ProblemFile::parse(&read(path)?)?.to_problem()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
