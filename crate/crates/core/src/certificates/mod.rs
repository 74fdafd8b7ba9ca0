//! Decision procedures for ε-optimality of a candidate point.
//!
//! Each mode checks `∂_{ε′}h(x̄) ⊆ U(ε′)` for every `ε′` of a finite sweep,
//! where `U(ε′)` is the union set of the mode (see [`membership`]). Vertices
//! of `∂_{ε′}h(x̄)` are tested as points; each ray `r` is tested by
//! maximizing `t` over the slopes `v₀ + t·r`, with `v₀` the first vertex.
//! A failed test is an exact refutation; passing every test certifies the
//! inclusion only at the swept values.
//!
//! The slope `0` is exempt at every `ε′ > 0`: when `inf f = -∞` and `h` is
//! bounded below it lies in `∂_{ε′}h(x̄)` for large `ε′` but in no
//! `∂(αf)(x̄)`, even at an optimal `x̄`.

pub mod gates;
pub mod membership;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LpOutcome, Sense};
use crate::model::{PolyhedralConvexFunction, ReverseProblem};
use crate::scalar::{Extended, Scalar};
use crate::subdiff::{subdiff_member, subdiff_vrep, SubdiffQuery};

pub use gates::{essential_check, infimum_over, slater_check, EssentialCheck, SlaterCheck};
pub use membership::{
    constrained_program, convex_case_member, convex_program, equality_program, rop_program,
    union_member_constrained, union_member_equality, union_member_rop, BetaMode, Membership,
    MembershipProgram, Mode, Target,
};

/// The finite set of `ε′` values standing in for `∀ ε′ ≥ 0`.
///
/// Grid values are sorted, deduplicated and always contain `0`. The
/// randomized extras are drawn from `[0, random_upper]` with a seeded
/// ChaCha8 stream and checked after the grid, in draw order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsPrimeSweep {
    values: Vec<Scalar>,
    randomized_extra: usize,
    seed: u64,
    random_upper: Scalar,
}

/// Denominator of the randomized draws.
const DRAW_RESOLUTION: i64 = 1024;

impl EpsPrimeSweep {
    pub fn new(
        values: Vec<Scalar>,
        randomized_extra: usize,
        seed: u64,
        random_upper: Scalar,
    ) -> Result<Self> {
        if values.iter().any(Scalar::is_negative) || random_upper.is_negative() {
            return Err(Error::InvalidInput("ε′ values must be nonnegative".into()));
        }
        let mut values = values;
        values.push(Scalar::zero());
        values.sort();
        values.dedup();
        Ok(EpsPrimeSweep {
            values,
            randomized_extra,
            seed,
            random_upper,
        })
    }

    /// `{0, ε̂/8, ε̂/4, ε̂/2, ε̂, 2ε̂, 4ε̂}` with `ε̂ = max(ε, 1)`, plus eight
    /// draws from `[0, 4ε̂]`.
    pub fn default_for(eps: &Scalar, seed: u64) -> Self {
        let hat = Scalar::max_of(eps, &Scalar::one());
        let values = [(0, 1), (1, 8), (1, 4), (1, 2), (1, 1), (2, 1), (4, 1)]
            .iter()
            .map(|&(p, q)| &hat * Scalar::frac(p, q))
            .collect();
        Self::new(values, 8, seed, &hat * Scalar::from_int(4)).expect("nonnegative grid")
    }

    /// `{k·ε̂/16 : 0 ≤ k ≤ 64}` plus eight draws from `[0, 4ε̂]`.
    pub fn dense(eps_hat: &Scalar, seed: u64) -> Result<Self> {
        let values = (0..=64).map(|k| eps_hat * Scalar::frac(k, 16)).collect();
        Self::new(values, 8, seed, eps_hat * Scalar::from_int(4))
    }

    /// Exactly the given values, with no random extras.
    pub fn explicit(values: Vec<Scalar>) -> Result<Self> {
        Self::new(values, 0, 0, Scalar::zero())
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn randomized_extra(&self) -> usize {
        self.randomized_extra
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Grid values followed by the fresh random draws, without repeats.
    pub fn points(&self) -> Vec<Scalar> {
        let mut out = self.values.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.randomized_extra {
            let u: i64 = rng.gen_range(0..=DRAW_RESOLUTION);
            let v = &self.random_upper * Scalar::frac(u, DRAW_RESOLUTION);
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictStatus {
    CertifiedOnGrid,
    Refuted,
    Inapplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InapplicableReason {
    PointNotOnBoundary,
    EssentialAssumptionFails,
    SlaterFails,
    PointOffDomain,
}

impl InapplicableReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            InapplicableReason::PointNotOnBoundary => "point-not-on-boundary",
            InapplicableReason::EssentialAssumptionFails => "essential-assumption-fails",
            InapplicableReason::SlaterFails => "slater-fails",
            InapplicableReason::PointOffDomain => "point-off-domain",
        }
    }
}

/// Which generator of `∂_{ε′}h(x̄)` a check concerns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorRef {
    Vertex { index: usize, point: Vec<Scalar> },
    Ray { index: usize, direction: Vec<Scalar> },
    /// The convex mode tests the single slope `0`.
    Origin,
}

/// One membership LP of a verification run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub eps_prime: Scalar,
    pub generator: GeneratorRef,
    pub accepted: bool,
    pub supremum: Extended,
    pub outcome: LpOutcome,
}

/// A slope in `∂_{ε′}h(x̄)` outside the union set, with the LP evidence.
///
/// `evidence` is the outcome of maximizing `α` over the point membership
/// program: either a Farkas certificate or an optimal dual proving `α ≤ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub eps_prime: Scalar,
    pub xstar: Vec<Scalar>,
    pub generator: GeneratorRef,
    pub evidence: LpOutcome,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateReport {
    pub in_domain: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub on_boundary: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraints_satisfied: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub essential: Option<EssentialCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slater: Option<SlaterCheck>,
    /// When the essential assumption fails: is `0 ∈ ∂_ε f(x̄)`?
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_in_eps_subdifferential: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateVerdict {
    pub mode: Mode,
    pub status: VerdictStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<InapplicableReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub gates: GateReport,
    pub eps_primes: Vec<Scalar>,
    pub log: Vec<CheckRecord>,
}

impl CertificateVerdict {
    pub fn is_certified(&self) -> bool {
        self.status == VerdictStatus::CertifiedOnGrid
    }

    pub fn is_refuted(&self) -> bool {
        self.status == VerdictStatus::Refuted
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }
}

/// Runs the applicability gates of `mode`; a returned reason stops verification.
pub fn run_gates(problem: &ReverseProblem, mode: Mode) -> Result<(GateReport, Option<InapplicableReason>)> {
    let f = problem.objective();
    let h = problem.reverse();
    let x = problem.point();
    let mut gates = GateReport {
        in_domain: f.in_domain(x),
        ..GateReport::default()
    };
    if !gates.in_domain {
        return Ok((gates, Some(InapplicableReason::PointOffDomain)));
    }
    let on_boundary = h.value(x).is_some_and(|v| v.is_zero());
    gates.on_boundary = Some(on_boundary);
    if !on_boundary {
        return Ok((gates, Some(InapplicableReason::PointNotOnBoundary)));
    }
    if mode == Mode::Constrained {
        let ok = problem
            .constraints()
            .iter()
            .all(|g| g.value(x).is_some_and(|v| !v.is_positive()));
        gates.constraints_satisfied = Some(ok);
        if !ok {
            return Ok((gates, Some(InapplicableReason::PointOffDomain)));
        }
    }
    let region: Vec<PolyhedralConvexFunction> = match mode {
        Mode::Rop => Vec::new(),
        Mode::Equality => vec![h.clone()],
        Mode::Constrained => problem.constraints().to_vec(),
        Mode::Convex => return Ok((gates, None)),
    };
    let essential = essential_check(f, &region, x, problem.epsilon())?;
    let holds = essential.holds;
    gates.essential = Some(essential);
    if !holds {
        let q = SubdiffQuery::new(f.clone(), x.to_vec(), problem.epsilon().clone())?;
        gates.zero_in_eps_subdifferential = Some(subdiff_member(&q, &vec![Scalar::zero(); x.len()])?);
        return Ok((gates, Some(InapplicableReason::EssentialAssumptionFails)));
    }
    if mode == Mode::Constrained {
        let slater = slater_check(problem.constraints(), f)?;
        let holds = slater.holds;
        gates.slater = Some(slater);
        if !holds {
            return Ok((gates, Some(InapplicableReason::SlaterFails)));
        }
    }
    Ok((gates, None))
}

/// The membership program of `mode` at one `ε′` and target.
pub fn membership_program(
    problem: &ReverseProblem,
    mode: Mode,
    eps_prime: &Scalar,
    target: &Target,
) -> Result<MembershipProgram> {
    let f = problem.objective();
    let x = problem.point();
    let eps = problem.epsilon();
    match mode {
        Mode::Rop => rop_program(f, x, eps, eps_prime, target),
        Mode::Constrained => constrained_program(f, problem.constraints(), x, eps, eps_prime, target),
        Mode::Equality => equality_program(f, problem.reverse(), x, eps, eps_prime, target, BetaMode::Free),
        Mode::Convex => convex_program(f, problem.reverse(), x, eps),
    }
}

struct EpsResult {
    records: Vec<CheckRecord>,
    witness: Option<Witness>,
}

fn check_eps_prime(problem: &ReverseProblem, mode: Mode, eps_prime: &Scalar) -> Result<EpsResult> {
    let q = SubdiffQuery::new(problem.reverse().clone(), problem.point().to_vec(), eps_prime.clone())?;
    let v = subdiff_vrep(&q)?;
    let mut records = Vec::new();
    for (index, vertex) in v.vertices().iter().enumerate() {
        let target = Target::Point {
            xstar: vertex.clone(),
        };
        let mut m = membership_program(problem, mode, eps_prime, &target)?.decide()?;
        m.accepted |= exempt_slope(eps_prime, vertex);
        let generator = GeneratorRef::Vertex {
            index,
            point: vertex.clone(),
        };
        records.push(CheckRecord {
            eps_prime: eps_prime.clone(),
            generator: generator.clone(),
            accepted: m.accepted,
            supremum: m.supremum,
            outcome: m.outcome.clone(),
        });
        if !m.accepted {
            let witness = Witness {
                eps_prime: eps_prime.clone(),
                xstar: vertex.clone(),
                generator,
                evidence: m.outcome,
            };
            return Ok(EpsResult {
                records,
                witness: Some(witness),
            });
        }
    }
    let Some(base) = v.vertices().first() else {
        return Ok(EpsResult {
            records,
            witness: None,
        });
    };
    for (index, direction) in v.rays().iter().enumerate() {
        let target = Target::Ray {
            base: base.clone(),
            direction: direction.clone(),
        };
        let m = membership_program(problem, mode, eps_prime, &target)?.decide()?;
        let generator = GeneratorRef::Ray {
            index,
            direction: direction.clone(),
        };
        records.push(CheckRecord {
            eps_prime: eps_prime.clone(),
            generator: generator.clone(),
            accepted: m.accepted,
            supremum: m.supremum.clone(),
            outcome: m.outcome,
        });
        if !m.accepted {
            let reach = match &m.supremum {
                Extended::Finite(t) => t.clone(),
                _ => Scalar::zero(),
            };
            let step = reach + Scalar::one();
            let xstar: Vec<Scalar> = base.iter().zip(direction).map(|(b, d)| b + &step * d).collect();
            let target = Target::Point {
                xstar: xstar.clone(),
            };
            let point = membership_program(problem, mode, eps_prime, &target)?.decide()?;
            if point.accepted {
                return Err(Error::Inconsistent(
                    "ray test failed but the extrapolated slope is a member".into(),
                ));
            }
            let witness = Witness {
                eps_prime: eps_prime.clone(),
                xstar,
                generator,
                evidence: point.outcome,
            };
            return Ok(EpsResult {
                records,
                witness: Some(witness),
            });
        }
    }
    Ok(EpsResult {
        records,
        witness: None,
    })
}

/// The zero slope at a positive `ε′` needs no union membership.
pub fn exempt_slope(eps_prime: &Scalar, xstar: &[Scalar]) -> bool {
    eps_prime.is_positive() && xstar.iter().all(Scalar::is_zero)
}

fn inapplicable(mode: Mode, gates: GateReport, reason: InapplicableReason) -> CertificateVerdict {
    CertificateVerdict {
        mode,
        status: VerdictStatus::Inapplicable,
        reason: Some(reason),
        witness: None,
        gates,
        eps_primes: Vec::new(),
        log: Vec::new(),
    }
}

/// Decides the optimality criterion of `mode` on every value of the sweep.
///
/// The first failure in sweep order (grid values ascending, then random
/// draws), and within one `ε′` in generator order, is reported, so the
/// verdict does not depend on how the checks are scheduled.
pub fn verify(problem: &ReverseProblem, mode: Mode, sweep: &EpsPrimeSweep) -> Result<CertificateVerdict> {
    let (gates, reason) = run_gates(problem, mode)?;
    if let Some(reason) = reason {
        return Ok(inapplicable(mode, gates, reason));
    }

    if mode == Mode::Convex {
        let m = convex_program(
            problem.objective(),
            problem.reverse(),
            problem.point(),
            problem.epsilon(),
        )?
        .decide()?;
        let record = CheckRecord {
            eps_prime: Scalar::zero(),
            generator: GeneratorRef::Origin,
            accepted: m.accepted,
            supremum: m.supremum,
            outcome: m.outcome.clone(),
        };
        let witness = (!m.accepted).then(|| Witness {
            eps_prime: Scalar::zero(),
            xstar: vec![Scalar::zero(); problem.dim()],
            generator: GeneratorRef::Origin,
            evidence: m.outcome,
        });
        return Ok(CertificateVerdict {
            mode,
            status: if m.accepted {
                VerdictStatus::CertifiedOnGrid
            } else {
                VerdictStatus::Refuted
            },
            reason: None,
            witness,
            gates,
            eps_primes: vec![Scalar::zero()],
            log: vec![record],
        });
    }

    let points = sweep.points();
    let results: Vec<Result<EpsResult>> = points
        .par_iter()
        .map(|e| check_eps_prime(problem, mode, e))
        .collect();
    let mut log = Vec::new();
    let mut witness = None;
    let mut checked = Vec::new();
    for (e, r) in points.iter().zip(results) {
        let r = r?;
        checked.push(e.clone());
        log.extend(r.records);
        if r.witness.is_some() {
            witness = r.witness;
            break;
        }
    }
    Ok(CertificateVerdict {
        mode,
        status: if witness.is_some() {
            VerdictStatus::Refuted
        } else {
            VerdictStatus::CertifiedOnGrid
        },
        reason: None,
        witness,
        gates,
        eps_primes: checked,
        log,
    })
}

/// `ε̂ = max(ε, 1, f(x̄) - inf f)`, ignoring an infinite infimum.
pub fn dense_scale(problem: &ReverseProblem) -> Result<Scalar> {
    let mut hat = Scalar::max_of(problem.epsilon(), &Scalar::one());
    if let (Some(fx), (Extended::Finite(inf), _)) = (
        problem.objective().value(problem.point()),
        infimum_over(problem.objective(), &[])?,
    ) {
        hat = Scalar::max_of(&hat, &(fx - inf));
    }
    Ok(hat)
}

/// The denser sweep used by [`falsify`].
pub fn dense_sweep(problem: &ReverseProblem, seed: u64) -> Result<EpsPrimeSweep> {
    EpsPrimeSweep::dense(&dense_scale(problem)?, seed)
}

/// Searches for a refutation on the dense sweep. The returned verdict is
/// `REFUTED` with the first witness found, `CERTIFIED_ON_GRID` when none
/// exists on the sweep, or `INAPPLICABLE` when a gate fails.
pub fn falsify(problem: &ReverseProblem, mode: Mode, seed: u64) -> Result<CertificateVerdict> {
    verify(problem, mode, &dense_sweep(problem, seed)?)
}

/// Re-checks a witness from scratch: `x*` lies in `∂_{ε′}h(x̄)` (except for
/// the convex mode, whose witness is the slope `0`) and the recorded
/// evidence re-validates against the rebuilt membership program and rules
/// out every `α > 0`.
pub fn recheck_witness(problem: &ReverseProblem, mode: Mode, witness: &Witness) -> Result<bool> {
    if mode != Mode::Convex {
        if exempt_slope(&witness.eps_prime, &witness.xstar) {
            return Ok(false);
        }
        let q = SubdiffQuery::new(
            problem.reverse().clone(),
            problem.point().to_vec(),
            witness.eps_prime.clone(),
        )?;
        if !subdiff_member(&q, &witness.xstar)? {
            return Ok(false);
        }
    }
    let target = Target::Point {
        xstar: witness.xstar.clone(),
    };
    let prog = membership_program(problem, mode, &witness.eps_prime, &target)?;
    if !prog.solved_program().verify_outcome(&witness.evidence) {
        return Ok(false);
    }
    Ok(match &witness.evidence {
        LpOutcome::Infeasible { .. } => true,
        LpOutcome::Optimal { value, .. } => !value.is_positive(),
        LpOutcome::Unbounded { .. } => false,
    })
}

/// Re-checks one logged membership test from scratch: the generator is the
/// one listed at its index by the canonical V-representation of
/// `∂_{ε′}h(x̄)`, the recorded outcome re-validates against the rebuilt
/// program, and the recorded supremum and decision follow from it.
pub fn recheck_record(problem: &ReverseProblem, mode: Mode, record: &CheckRecord) -> Result<bool> {
    let target = match &record.generator {
        GeneratorRef::Origin => {
            if mode != Mode::Convex {
                return Ok(false);
            }
            Target::Point {
                xstar: vec![Scalar::zero(); problem.dim()],
            }
        }
        GeneratorRef::Vertex { index, point } => {
            let v = subdiff_vrep(&SubdiffQuery::new(
                problem.reverse().clone(),
                problem.point().to_vec(),
                record.eps_prime.clone(),
            )?)?;
            if v.vertices().get(*index) != Some(point) {
                return Ok(false);
            }
            Target::Point { xstar: point.clone() }
        }
        GeneratorRef::Ray { index, direction } => {
            let v = subdiff_vrep(&SubdiffQuery::new(
                problem.reverse().clone(),
                problem.point().to_vec(),
                record.eps_prime.clone(),
            )?)?;
            match (v.vertices().first(), v.rays().get(*index)) {
                (Some(base), Some(r)) if r == direction => Target::Ray {
                    base: base.clone(),
                    direction: direction.clone(),
                },
                _ => return Ok(false),
            }
        }
    };
    let prog = membership_program(problem, mode, &record.eps_prime, &target)?;
    if !prog.solved_program().verify_outcome(&record.outcome) {
        return Ok(false);
    }
    let supremum = record.outcome.extended_value(Sense::Maximize);
    let accepted = match &target {
        Target::Point { xstar } => {
            supremum.is_positive() || (mode != Mode::Convex && exempt_slope(&record.eps_prime, xstar))
        }
        Target::Ray { .. } => supremum == Extended::PosInfinity,
    };
    Ok(supremum == record.supremum && accepted == record.accepted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ivec;

    fn f(pieces: &[(&[i64], i64)]) -> PolyhedralConvexFunction {
        PolyhedralConvexFunction::from_int_pieces(pieces).unwrap()
    }

    fn problem(obj: &[(&[i64], i64)], eps: Scalar) -> ReverseProblem {
        ReverseProblem::new(
            1,
            f(obj),
            f(&[(&[1], -1), (&[-1], -1)]),
            Vec::new(),
            ivec(&[1]),
            eps,
        )
        .unwrap()
    }

    const ABS: &[(&[i64], i64)] = &[(&[1], 0), (&[-1], 0)];
    const B: &[(&[i64], i64)] = &[(&[2], 0), (&[-1], 0)];

    #[test]
    fn sweep_defaults() {
        let s = EpsPrimeSweep::default_for(&Scalar::zero(), 0);
        assert_eq!(s.values().len(), 7);
        assert_eq!(s.values()[0], Scalar::zero());
        assert_eq!(s.values()[6], Scalar::from_int(4));
        let pts = s.points();
        assert!(pts.len() > 7 && pts.len() <= 15);
        assert!(pts.iter().all(|p| !p.is_negative() && p <= &Scalar::from_int(4)));
        assert_eq!(pts, EpsPrimeSweep::default_for(&Scalar::zero(), 0).points());
        let d = EpsPrimeSweep::dense(&Scalar::one(), 0).unwrap();
        assert_eq!(d.values().len(), 65);
        assert!(EpsPrimeSweep::explicit(vec![Scalar::from_int(-1)]).is_err());
        assert_eq!(EpsPrimeSweep::explicit(vec![Scalar::from_int(2)]).unwrap().points().len(), 2);
    }

    #[test]
    fn example_a_certified() {
        let p = problem(ABS, Scalar::zero());
        let v = verify(&p, Mode::Rop, &EpsPrimeSweep::default_for(p.epsilon(), 0)).unwrap();
        assert_eq!(v.status, VerdictStatus::CertifiedOnGrid);
        assert!(falsify(&p, Mode::Rop, 0).unwrap().is_certified());
    }

    #[test]
    fn example_b_refuted() {
        let p = problem(B, Scalar::zero());
        let sweep = EpsPrimeSweep::explicit(vec![Scalar::from_int(2)]).unwrap();
        let v = verify(&p, Mode::Rop, &sweep).unwrap();
        assert_eq!(v.status, VerdictStatus::Refuted);
        let w = v.witness().unwrap();
        assert_eq!(w.eps_prime, Scalar::from_int(2));
        assert_eq!(w.xstar, ivec(&[-1]));
        assert!(recheck_witness(&p, Mode::Rop, w).unwrap());

        let v = verify(&p, Mode::Rop, &EpsPrimeSweep::default_for(p.epsilon(), 0)).unwrap();
        let w = v.witness().unwrap();
        assert_eq!((w.eps_prime.clone(), w.xstar.clone()), (Scalar::from_int(2), ivec(&[-1])));
        assert!(falsify(&p, Mode::Rop, 0).unwrap().is_refuted());
    }

    #[test]
    fn example_b_loose_eps_certified() {
        let p = problem(B, Scalar::one());
        let v = verify(&p, Mode::Rop, &EpsPrimeSweep::default_for(p.epsilon(), 0)).unwrap();
        assert_eq!(v.status, VerdictStatus::CertifiedOnGrid);
    }

    #[test]
    fn gates() {
        let p = problem(ABS, Scalar::one());
        let v = verify(&p, Mode::Rop, &EpsPrimeSweep::default_for(p.epsilon(), 0)).unwrap();
        assert_eq!(v.reason, Some(InapplicableReason::EssentialAssumptionFails));
        assert_eq!(v.gates.zero_in_eps_subdifferential, Some(true));
        assert!(falsify(&p, Mode::Rop, 0).unwrap().witness().is_none());

        let off = ReverseProblem::new(1, f(ABS), f(&[(&[1], -1), (&[-1], -1)]), Vec::new(), ivec(&[2]), Scalar::zero()).unwrap();
        let v = verify(&off, Mode::Rop, &EpsPrimeSweep::default_for(&Scalar::zero(), 0)).unwrap();
        assert_eq!(v.reason, Some(InapplicableReason::PointNotOnBoundary));

        let pinned = problem(ABS, Scalar::zero())
            .with_constraints(vec![f(&[(&[1], -1), (&[-1], 1)])])
            .unwrap();
        let v = verify(&pinned, Mode::Constrained, &EpsPrimeSweep::default_for(&Scalar::zero(), 0)).unwrap();
        assert_eq!(v.reason, Some(InapplicableReason::EssentialAssumptionFails));
        let violated = problem(ABS, Scalar::zero())
            .with_constraints(vec![f(&[(&[1], -2), (&[-1], -2)]), f(&[(&[0], 1)])])
            .unwrap();
        let v = verify(&violated, Mode::Constrained, &EpsPrimeSweep::default_for(&Scalar::zero(), 0)).unwrap();
        assert_eq!(v.reason, Some(InapplicableReason::PointOffDomain));
    }

    #[test]
    fn modes_agree_on_examples() {
        for (obj, eps) in [(ABS, 0), (B, 0), (B, 1)] {
            let p = problem(obj, Scalar::from_int(eps));
            let sweep = EpsPrimeSweep::default_for(p.epsilon(), 0);
            let rop = verify(&p, Mode::Rop, &sweep).unwrap();
            let con = verify(&p, Mode::Constrained, &sweep).unwrap();
            assert_eq!(rop.status, con.status);
            assert_eq!(rop.witness.map(|w| w.xstar), con.witness.map(|w| w.xstar));
        }
    }

    #[test]
    fn zero_slope_exempt_when_f_unbounded_below() {
        let f = f(&[(&[2], 0), (&[1], 2)]);
        let h = PolyhedralConvexFunction::from_int_pieces(&[(&[1], 2), (&[0], -1)]).unwrap();
        let p = ReverseProblem::new(1, f, h, Vec::new(), ivec(&[-2]), Scalar::frac(1, 4)).unwrap();
        let sweep = EpsPrimeSweep::explicit(vec![Scalar::one(), Scalar::from_int(4)]).unwrap();
        for mode in [Mode::Rop, Mode::Constrained, Mode::Equality] {
            let v = verify(&p, mode, &sweep).unwrap();
            assert!(v.is_certified(), "{mode}: {:?}", v.witness());
            assert!(v.log.iter().any(|r| !r.supremum.is_positive() && r.accepted));
            for r in &v.log {
                assert!(recheck_record(&p, mode, r).unwrap());
            }
        }
        let w = Witness {
            eps_prime: Scalar::one(),
            xstar: ivec(&[0]),
            generator: GeneratorRef::Vertex {
                index: 0,
                point: ivec(&[0]),
            },
            evidence: union_member_rop(p.objective(), p.point(), p.epsilon(), &Scalar::one(), &ivec(&[0]))
                .unwrap()
                .outcome,
        };
        assert!(!recheck_witness(&p, Mode::Rop, &w).unwrap());
    }

    #[test]
    fn convex_mode() {
        let p = problem(ABS, Scalar::zero());
        let v = verify(&p, Mode::Convex, &EpsPrimeSweep::default_for(p.epsilon(), 0)).unwrap();
        assert!(v.is_refuted());
        assert!(recheck_witness(&p, Mode::Convex, v.witness().unwrap()).unwrap());
        let p = problem(ABS, Scalar::one());
        let v = verify(&p, Mode::Convex, &EpsPrimeSweep::default_for(p.epsilon(), 0)).unwrap();
        assert!(v.is_certified());
    }

    #[test]
    fn logged_records_recheck() {
        for (obj, eps) in [(ABS, 0), (B, 0), (B, 1)] {
            let p = problem(obj, Scalar::from_int(eps));
            for mode in [Mode::Rop, Mode::Equality, Mode::Convex] {
                let v = verify(&p, mode, &EpsPrimeSweep::default_for(p.epsilon(), 0)).unwrap();
                for r in &v.log {
                    assert!(recheck_record(&p, mode, r).unwrap(), "{mode} {r:?}");
                    let mut flipped = r.clone();
                    flipped.accepted = !flipped.accepted;
                    assert!(!recheck_record(&p, mode, &flipped).unwrap());
                }
            }
        }
    }
}
