//! Homogenized membership programs for the union sets of the optimality
//! criteria.
//!
//! For `x* ∈ ∂_e(Σ_b c_b φ_b)(x̄)` with `c_b ≥ 0`, every piece of every `φ_b`
//! gets a multiplier `ν ≥ 0` with `Σ_i ν_{b,i} = c_b`, and every domain row a
//! multiplier `η ≥ 0`. Membership is then the linear system
//!
//! ```text
//! Σ ν_{b,i} a_{b,i} + Σ η_r C_r = x*,
//! Σ ν_{b,i} (φ_b(x̄) - φ_{b,i}(x̄)) + Σ η_r (d_r - C_r·x̄) ≤ e.
//! ```
//!
//! A zero coefficient keeps the domain rows, so `0·φ` is the indicator of
//! `dom φ`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lp::{lp_max_component, LinearProgram, LpOutcome, Relation};
use crate::model::PolyhedralConvexFunction;
use crate::scalar::{Extended, Scalar};

/// The optimality criterion being decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `min f` subject to `h ≥ 0`.
    Rop,
    /// `min f` subject to `h ≥ 0` and `G ≤ 0`.
    Constrained,
    /// `min f` subject to `h = 0`.
    Equality,
    /// `min f` subject to `h ≤ 0`.
    Convex,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Rop => "rop",
            Mode::Constrained => "constrained",
            Mode::Equality => "equality",
            Mode::Convex => "convex",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rop" => Ok(Mode::Rop),
            "constrained" => Ok(Mode::Constrained),
            "equality" => Ok(Mode::Equality),
            "convex" => Ok(Mode::Convex),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

/// How the multiplier of `h` is treated in the equality criterion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMode {
    /// `β ≥ 0`.
    #[default]
    Free,
    /// `β = 0`.
    Zero,
}

/// What the gradient side of the membership system must equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Target {
    /// A fixed slope `x*`.
    Point { xstar: Vec<Scalar> },
    /// `base + t·direction` with `t ≥ 0` a variable.
    Ray {
        base: Vec<Scalar>,
        direction: Vec<Scalar>,
    },
}

/// A membership system together with the variable whose supremum decides it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipProgram {
    pub lp: LinearProgram,
    /// `α` for point targets, `t` for ray targets.
    pub decision_var: usize,
    pub target: Target,
}

/// Decision of one membership program.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub accepted: bool,
    pub supremum: Extended,
    pub outcome: LpOutcome,
}

impl MembershipProgram {
    /// Solves the program and applies the acceptance rule: a point is a
    /// member iff the supremum of `α` is positive, a ray is contained iff the
    /// supremum of `t` is infinite.
    pub fn decide(&self) -> Result<Membership> {
        let (supremum, outcome) = lp_max_component(&self.lp, self.decision_var)?;
        let accepted = match self.target {
            Target::Point { .. } => supremum.is_positive(),
            Target::Ray { .. } => supremum == Extended::PosInfinity,
        };
        Ok(Membership {
            accepted,
            supremum,
            outcome,
        })
    }

    /// The program actually solved by [`MembershipProgram::decide`], with
    /// its objective set; certificates refer to this program.
    pub fn solved_program(&self) -> LinearProgram {
        let mut e = vec![Scalar::zero(); self.lp.num_vars];
        e[self.decision_var] = Scalar::one();
        self.lp.clone().maximize(e)
    }
}

/// Sparse terms, relation and right-hand side of one constraint.
type SparseRow = (Vec<(usize, Scalar)>, Relation, Scalar);

struct Builder {
    dim: usize,
    vars: usize,
    nonneg: Vec<usize>,
    rows: Vec<SparseRow>,
    gradient: Vec<Vec<(usize, Scalar)>>,
    budget: Vec<(usize, Scalar)>,
}

impl Builder {
    fn new(dim: usize) -> Self {
        Builder {
            dim,
            vars: 0,
            nonneg: Vec::new(),
            rows: Vec::new(),
            gradient: vec![Vec::new(); dim],
            budget: Vec::new(),
        }
    }

    fn var(&mut self, nonneg: bool) -> usize {
        let v = self.vars;
        self.vars += 1;
        if nonneg {
            self.nonneg.push(v);
        }
        v
    }

    fn row(&mut self, terms: Vec<(usize, Scalar)>, rel: Relation, rhs: Scalar) {
        self.rows.push((terms, rel, rhs));
    }

    /// Adds the multiplier block of `coef·φ` at `x̄`.
    fn block(&mut self, phi: &PolyhedralConvexFunction, coef: usize, xbar: &[Scalar]) {
        let gaps = phi.gaps(xbar);
        let mut sum = vec![(coef, -Scalar::one())];
        for (p, gap) in phi.pieces().iter().zip(gaps) {
            let nu = self.var(true);
            sum.push((nu, Scalar::one()));
            for (c, a) in p.a.iter().enumerate() {
                if !a.is_zero() {
                    self.gradient[c].push((nu, a.clone()));
                }
            }
            if !gap.is_zero() {
                self.budget.push((nu, gap));
            }
        }
        self.row(sum, Relation::Eq, Scalar::zero());
        if let Some(d) = phi.domain() {
            for (row, slack) in d.rows().iter().zip(d.slacks(xbar)) {
                let eta = self.var(true);
                for (c, a) in row.iter().enumerate() {
                    if !a.is_zero() {
                        self.gradient[c].push((eta, a.clone()));
                    }
                }
                if !slack.is_zero() {
                    self.budget.push((eta, slack));
                }
            }
        }
    }

    /// Gradient rows `Σ … = target`, returning the ray variable if any.
    fn close_gradient(&mut self, target: &Target) -> Option<usize> {
        let t = matches!(target, Target::Ray { .. }).then(|| self.var(true));
        for c in 0..self.dim {
            let mut terms = std::mem::take(&mut self.gradient[c]);
            let rhs = match target {
                Target::Point { xstar } => xstar[c].clone(),
                Target::Ray { base, direction } => {
                    if !direction[c].is_zero() {
                        terms.push((t.expect("ray variable"), -&direction[c]));
                    }
                    base[c].clone()
                }
            };
            self.row(terms, Relation::Eq, rhs);
        }
        t
    }

    fn finish(self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.vars);
        for v in self.nonneg {
            lp.nonneg(v);
        }
        for (terms, rel, rhs) in self.rows {
            lp.add_sparse(&terms, rel, rhs);
        }
        lp
    }
}

fn check_target(dim: usize, target: &Target) -> Result<()> {
    match target {
        Target::Point { xstar } => check_dim(dim, xstar.len()),
        Target::Ray { base, direction } => {
            check_dim(dim, base.len())?;
            check_dim(dim, direction.len())
        }
    }
}

fn require_domain(phi: &PolyhedralConvexFunction, xbar: &[Scalar], what: &str) -> Result<()> {
    check_dim(phi.dim(), xbar.len())?;
    if phi.in_domain(xbar) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("point lies outside dom {what}")))
    }
}

fn program(lp: LinearProgram, alpha: usize, t: Option<usize>, target: &Target) -> MembershipProgram {
    MembershipProgram {
        lp,
        decision_var: t.unwrap_or(alpha),
        target: target.clone(),
    }
}

/// `∃ α > 0 : x* ∈ ∂_{αε+ε′}(αf)(x̄)`.
pub fn rop_program(
    f: &PolyhedralConvexFunction,
    xbar: &[Scalar],
    eps: &Scalar,
    eps_prime: &Scalar,
    target: &Target,
) -> Result<MembershipProgram> {
    require_domain(f, xbar, "f")?;
    check_target(f.dim(), target)?;
    let mut b = Builder::new(f.dim());
    let alpha = b.var(true);
    b.block(f, alpha, xbar);
    let t = b.close_gradient(target);
    let mut budget = std::mem::take(&mut b.budget);
    budget.push((alpha, -eps));
    b.row(budget, Relation::Le, eps_prime.clone());
    Ok(program(b.finish(), alpha, t, target))
}

/// `∃ α > 0, β ≥ 0 : x* ∈ ∂_{αε+ε′}(αf + βh)(x̄)`.
pub fn equality_program(
    f: &PolyhedralConvexFunction,
    h: &PolyhedralConvexFunction,
    xbar: &[Scalar],
    eps: &Scalar,
    eps_prime: &Scalar,
    target: &Target,
    beta_mode: BetaMode,
) -> Result<MembershipProgram> {
    require_domain(f, xbar, "f")?;
    require_domain(h, xbar, "h")?;
    check_target(f.dim(), target)?;
    let mut b = Builder::new(f.dim());
    let alpha = b.var(true);
    let beta = b.var(true);
    b.block(f, alpha, xbar);
    b.block(h, beta, xbar);
    if beta_mode == BetaMode::Zero {
        b.row(vec![(beta, Scalar::one())], Relation::Eq, Scalar::zero());
    }
    let t = b.close_gradient(target);
    let mut budget = std::mem::take(&mut b.budget);
    budget.push((alpha, -eps));
    b.row(budget, Relation::Le, eps_prime.clone());
    Ok(program(b.finish(), alpha, t, target))
}

/// `∃ α > 0, μ ≥ 0, ε₁, ε₂ ≥ 0` with `ε₁ + ε₂ = αε + ε′`,
/// `-ε₂ ≤ ⟨μ, G(x̄)⟩ ≤ 0` and `x* ∈ ∂_{ε₁}(αf + μ∘G)(x̄)`.
pub fn constrained_program(
    f: &PolyhedralConvexFunction,
    g: &[PolyhedralConvexFunction],
    xbar: &[Scalar],
    eps: &Scalar,
    eps_prime: &Scalar,
    target: &Target,
) -> Result<MembershipProgram> {
    require_domain(f, xbar, "f")?;
    for (j, gj) in g.iter().enumerate() {
        require_domain(gj, xbar, &format!("g_{j}"))?;
        if gj.max_piece(xbar).is_positive() {
            return Err(Error::InvalidInput(format!("constraint g_{j} is violated at the point")));
        }
    }
    check_target(f.dim(), target)?;
    let mut b = Builder::new(f.dim());
    let alpha = b.var(true);
    let eps1 = b.var(true);
    let eps2 = b.var(true);
    b.block(f, alpha, xbar);
    let mut complementarity = Vec::new();
    for gj in g {
        let mu = b.var(true);
        b.block(gj, mu, xbar);
        let gx = gj.max_piece(xbar);
        if !gx.is_zero() {
            complementarity.push((mu, gx));
        }
    }
    let t = b.close_gradient(target);
    let mut budget = std::mem::take(&mut b.budget);
    budget.push((eps1, -Scalar::one()));
    b.row(budget, Relation::Le, Scalar::zero());
    b.row(
        vec![(eps1, Scalar::one()), (eps2, Scalar::one()), (alpha, -eps)],
        Relation::Eq,
        eps_prime.clone(),
    );
    if !complementarity.is_empty() {
        b.row(complementarity.clone(), Relation::Le, Scalar::zero());
        complementarity.push((eps2, Scalar::one()));
        b.row(complementarity, Relation::Ge, Scalar::zero());
    }
    Ok(program(b.finish(), alpha, t, target))
}

/// `0 ∈ ∂_ε(f + βh)(x̄)` for some `β ≥ 0`.
pub fn convex_program(
    f: &PolyhedralConvexFunction,
    h: &PolyhedralConvexFunction,
    xbar: &[Scalar],
    eps: &Scalar,
) -> Result<MembershipProgram> {
    require_domain(f, xbar, "f")?;
    require_domain(h, xbar, "h")?;
    let target = Target::Point {
        xstar: vec![Scalar::zero(); f.dim()],
    };
    let mut b = Builder::new(f.dim());
    let alpha = b.var(true);
    let beta = b.var(true);
    b.row(vec![(alpha, Scalar::one())], Relation::Eq, Scalar::one());
    b.block(f, alpha, xbar);
    b.block(h, beta, xbar);
    b.close_gradient(&target);
    let budget = std::mem::take(&mut b.budget);
    b.row(budget, Relation::Le, eps.clone());
    Ok(program(b.finish(), alpha, None, &target))
}

/// Union membership for the plain reverse constraint.
pub fn union_member_rop(
    f: &PolyhedralConvexFunction,
    xbar: &[Scalar],
    eps: &Scalar,
    eps_prime: &Scalar,
    xstar: &[Scalar],
) -> Result<Membership> {
    let target = Target::Point {
        xstar: xstar.to_vec(),
    };
    rop_program(f, xbar, eps, eps_prime, &target)?.decide()
}

/// Union membership with additional convex constraints `G ≤ 0`.
pub fn union_member_constrained(
    f: &PolyhedralConvexFunction,
    g: &[PolyhedralConvexFunction],
    xbar: &[Scalar],
    eps: &Scalar,
    eps_prime: &Scalar,
    xstar: &[Scalar],
) -> Result<Membership> {
    let target = Target::Point {
        xstar: xstar.to_vec(),
    };
    constrained_program(f, g, xbar, eps, eps_prime, &target)?.decide()
}

/// Union membership for the equality constraint `h = 0`.
pub fn union_member_equality(
    f: &PolyhedralConvexFunction,
    h: &PolyhedralConvexFunction,
    xbar: &[Scalar],
    eps: &Scalar,
    eps_prime: &Scalar,
    xstar: &[Scalar],
    beta_mode: BetaMode,
) -> Result<Membership> {
    if h.value(xbar).is_none_or(|v| !v.is_zero()) {
        return Err(Error::InvalidInput("the point is not on {h = 0}".into()));
    }
    let target = Target::Point {
        xstar: xstar.to_vec(),
    };
    equality_program(f, h, xbar, eps, eps_prime, &target, beta_mode)?.decide()
}

/// `0 ∈ ⋃_{β ≥ 0} ∂_ε(f + βh)(x̄)`.
pub fn convex_case_member(
    f: &PolyhedralConvexFunction,
    h: &PolyhedralConvexFunction,
    xbar: &[Scalar],
    eps: &Scalar,
) -> Result<Membership> {
    convex_program(f, h, xbar, eps)?.decide()
}
