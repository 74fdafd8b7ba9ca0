//! Machine-readable reports. All numbers are rational strings, and field
//! order is fixed, so equal inputs give byte-identical documents.

use serde::{Deserialize, Serialize};

use revcert_core::oracle::{BruteResult, GridSpec};
use revcert_core::pareto::{BridgeReport, SigmaKind};
use revcert_core::{
    brute_eps_argmin, CertificateVerdict, Mode, OracleMode, ReverseProblem, Scalar, VPolytope,
    VerdictStatus,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Report {
    Verify(VerifyReport),
    Falsify(VerifyReport),
    Subdiff(SubdiffReport),
    Brute(BruteReport),
    Pareto(ParetoReport),
    Replay(ReplayReport),
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub verdict: CertificateVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
}

/// The brute-force oracle run next to a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub grid: GridSpec,
    /// `f(x̄)`, absent off the domain.
    pub candidate_value: Option<Scalar>,
    pub oracle: BruteResult,
    /// The oracle disagrees with the verdict by more than its error bound.
    pub contradiction: bool,
}

pub fn oracle_mode(mode: Mode) -> OracleMode {
    match mode {
        Mode::Rop => OracleMode::Reverse,
        Mode::Constrained => OracleMode::ConstrainedReverse,
        Mode::Equality => OracleMode::Equality,
        Mode::Convex => OracleMode::Convex,
    }
}

/// Runs the oracle on `grid` and compares it with `verdict`.
///
/// A refutation is contradicted when `x̄` beats every feasible grid point
/// up to `ε` with slack above `L·step`; a certificate is contradicted when
/// some feasible grid point improves on `f(x̄) - ε` by more than `L·step`.
pub fn cross_check(
    problem: &ReverseProblem,
    verdict: &CertificateVerdict,
    grid: &GridSpec,
) -> revcert_core::Result<CrossCheck> {
    let oracle = brute_eps_argmin(problem, oracle_mode(verdict.mode), grid)?;
    let candidate_value = problem.objective().value(problem.point());
    let contradiction = match (&candidate_value, &oracle.min_value) {
        (Some(fx), Some(min)) => match verdict.status {
            VerdictStatus::Refuted => min + problem.epsilon() - fx > oracle.error_bound,
            VerdictStatus::CertifiedOnGrid => fx - problem.epsilon() - min > oracle.error_bound,
            VerdictStatus::Inapplicable => false,
        },
        _ => false,
    };
    Ok(CrossCheck {
        grid: grid.clone(),
        candidate_value,
        oracle,
        contradiction,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdiffReport {
    pub function: String,
    pub point: Vec<Scalar>,
    pub eps: Scalar,
    pub bounded: bool,
    pub subdifferential: VPolytope,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteReport {
    pub candidate_value: Option<Scalar>,
    /// A feasible grid point with `f(x) < f(x̄) - ε`, if any.
    pub improving_point: Option<Vec<Scalar>>,
    pub result: BruteResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoReport {
    pub sigma: SigmaKind,
    pub eps: Vec<Scalar>,
    pub grid: GridSpec,
    /// `E^σ_{(ε, 0)}` of `x ↦ (f(x), -h(x))` on the grid.
    pub selected: Vec<Vec<Scalar>>,
    pub bridge: BridgeReport,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub replayed: String,
    pub checks: usize,
    pub failed_checks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_valid: Option<bool>,
    pub valid: bool,
}
