//! Finite-sample bicriteria checks: orthant preorders, ε-σ-efficient sets
//! and the identities linking them to the reverse convex problem.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lp::{lp_max_component, LinearProgram, Relation};
use crate::model::{AffineForm, PolyhedralConvexFunction};
use crate::oracle::GridSpec;
use crate::polytope::VPolytope;
use crate::scalar::{dot, Scalar};
use crate::subdiff::{subdiff_member, subdiff_vrep, SubdiffQuery};

/// Orthant relations between criterion vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preorder {
    /// Componentwise `≤`.
    Le,
    /// Componentwise `<`.
    Lt,
    /// `≤` and not equal.
    LeNe,
}

/// `y rel y′`.
pub fn vdom(y: &[Scalar], y_prime: &[Scalar], rel: Preorder) -> Result<bool> {
    check_dim(y.len(), y_prime.len())?;
    Ok(vdom_unchecked(y, y_prime, rel))
}

fn vdom_unchecked(y: &[Scalar], y_prime: &[Scalar], rel: Preorder) -> bool {
    let mut pairs = y.iter().zip(y_prime);
    match rel {
        Preorder::Le => pairs.all(|(a, b)| a <= b),
        Preorder::Lt => pairs.all(|(a, b)| a < b),
        Preorder::LeNe => y.iter().zip(y_prime).all(|(a, b)| a <= b) && pairs.any(|(a, b)| a != b),
    }
}

/// Efficiency notion of a set scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaKind {
    /// Strong: nothing outside `F(x̄) - ε + Y₊`.
    S,
    /// Efficient: nothing in `F(x̄) - ε - (Y₊ \ {0})`.
    E,
    /// Weak: nothing in `F(x̄) - ε - int Y₊`.
    W,
}

impl std::str::FromStr for SigmaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" => Ok(SigmaKind::S),
            "e" => Ok(SigmaKind::E),
            "w" => Ok(SigmaKind::W),
            other => Err(Error::Parse(format!("unknown efficiency kind `{other}`"))),
        }
    }
}

/// A finite sample of decision points with their criterion vectors;
/// `None` marks a point outside `dom F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoSample {
    r: usize,
    points: Vec<Vec<Scalar>>,
    images: Vec<Option<Vec<Scalar>>>,
}

impl ParetoSample {
    pub fn new(r: usize, points: Vec<Vec<Scalar>>, images: Vec<Option<Vec<Scalar>>>) -> Result<Self> {
        check_dim(points.len(), images.len())?;
        for y in images.iter().flatten() {
            check_dim(r, y.len())?;
        }
        Ok(ParetoSample { r, points, images })
    }

    /// Samples `x ↦ (φ_1(x), …, φ_r(x))` at the given points.
    pub fn from_functions(fs: &[PolyhedralConvexFunction], points: Vec<Vec<Scalar>>) -> Result<Self> {
        let images = points
            .iter()
            .map(|x| fs.iter().map(|f| f.value(x)).collect::<Option<Vec<_>>>())
            .collect();
        Self::new(fs.len(), points, images)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Scalar>] {
        &self.points
    }

    pub fn images(&self) -> &[Option<Vec<Scalar>>] {
        &self.images
    }
}

/// Does `y` beat the shifted reference `z = F(x̄) - ε` in the sense of σ?
fn beats(y: &[Scalar], z: &[Scalar], sigma: SigmaKind) -> bool {
    match sigma {
        SigmaKind::S => !vdom_unchecked(z, y, Preorder::Le),
        SigmaKind::W => vdom_unchecked(y, z, Preorder::Lt),
        SigmaKind::E => vdom_unchecked(y, z, Preorder::LeNe),
    }
}

fn shifted(y: &[Scalar], eps: &[Scalar]) -> Vec<Scalar> {
    y.iter().zip(eps).map(|(a, e)| a - e).collect()
}

/// Indices of the ε-σ-efficient points of the sample.
pub fn eff_set(sample: &ParetoSample, eps: &[Scalar], sigma: SigmaKind) -> Result<Vec<usize>> {
    check_dim(sample.r, eps.len())?;
    let finite: Vec<&Vec<Scalar>> = sample.images.iter().flatten().collect();
    Ok(sample
        .images
        .iter()
        .enumerate()
        .filter_map(|(i, y)| {
            let z = shifted(y.as_ref()?, eps);
            (!finite.iter().any(|other| beats(other, &z, sigma))).then_some(i)
        })
        .collect())
}

/// One grid scan relating the reverse problem to its bicriteria form
/// `x ↦ (f(x), -h(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeReport {
    /// No grid point satisfies `h ≥ 0`.
    pub vacuous: bool,
    /// Grid ε-argmin of `f` over `{h ≥ 0}`.
    pub argmin: Vec<Vec<Scalar>>,
    /// Weakly `(ε, 0)`-efficient points.
    pub weak: Vec<Vec<Scalar>>,
    /// `(ε, 0)`-efficient points.
    pub efficient: Vec<Vec<Scalar>>,
    /// Points of the argmin that are not weakly efficient.
    pub argmin_not_weak: Vec<Vec<Scalar>>,
    /// Efficient points on `{h = 0}` that are not in the argmin.
    pub efficient_boundary_not_argmin: Vec<Vec<Scalar>>,
}

impl BridgeReport {
    pub fn violations(&self) -> usize {
        self.argmin_not_weak.len() + self.efficient_boundary_not_argmin.len()
    }
}

/// Checks on a grid that the ε-argmin over `{h ≥ 0}` is weakly
/// `(ε, 0)`-efficient for `(f, -h)`, and that `(ε, 0)`-efficient points on
/// `{h = 0}` are ε-argmins.
pub fn bridge_check(
    f: &PolyhedralConvexFunction,
    h: &PolyhedralConvexFunction,
    grid: &GridSpec,
    eps: &Scalar,
) -> Result<BridgeReport> {
    check_dim(f.dim(), grid.dim())?;
    check_dim(h.dim(), grid.dim())?;
    let points = grid.points();
    let images: Vec<Option<Vec<Scalar>>> = points
        .iter()
        .map(|x| Some(vec![f.value(x)?, -h.value(x)?]))
        .collect();
    let sample = ParetoSample::new(2, points, images)?;
    let feasible: Vec<usize> = (0..sample.len())
        .filter(|&i| sample.images[i].as_ref().is_some_and(|y| !y[1].is_positive()))
        .collect();
    let min = feasible
        .iter()
        .map(|&i| sample.images[i].as_ref().expect("finite")[0].clone())
        .min();
    let argmin: Vec<usize> = match &min {
        Some(m) => {
            let cut = m + eps;
            feasible
                .iter()
                .copied()
                .filter(|&i| sample.images[i].as_ref().expect("finite")[0] <= cut)
                .collect()
        }
        None => Vec::new(),
    };
    let e = [eps.clone(), Scalar::zero()];
    let weak = eff_set(&sample, &e, SigmaKind::W)?;
    let efficient = eff_set(&sample, &e, SigmaKind::E)?;
    let pts = |ids: &[usize]| ids.iter().map(|&i| sample.points[i].clone()).collect::<Vec<_>>();
    let argmin_not_weak: Vec<usize> = argmin.iter().copied().filter(|i| !weak.contains(i)).collect();
    let efficient_boundary_not_argmin: Vec<usize> = efficient
        .iter()
        .copied()
        .filter(|&i| sample.images[i].as_ref().is_some_and(|y| y[1].is_zero()) && !argmin.contains(&i))
        .collect();
    Ok(BridgeReport {
        vacuous: feasible.is_empty(),
        argmin: pts(&argmin),
        weak: pts(&weak),
        efficient: pts(&efficient),
        argmin_not_weak: pts(&argmin_not_weak),
        efficient_boundary_not_argmin: pts(&efficient_boundary_not_argmin),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReeeReport {
    /// `(ε′, i)` with `i ∈ E^e_ε` but `i ∉ E^e_{ε+ε′}`.
    pub monotonicity_violations: Vec<(Vec<Scalar>, usize)>,
    /// Excluded points with a dominating point and the witness `ε′`.
    pub witnesses: Vec<ExclusionWitness>,
    pub witness_failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionWitness {
    pub excluded: usize,
    pub dominating: usize,
    pub eps_prime: Vec<Scalar>,
    pub confirmed: bool,
}

impl ReeeReport {
    pub fn passed(&self) -> bool {
        self.monotonicity_violations.is_empty() && self.witness_failures == 0
    }
}

/// Checks `E^e_ε ⊆ E^e_{ε+ε′}` for each listed `ε′ ⪈ 0`, and that every
/// excluded point stays excluded at `ε′ = (F(x̄) - F(x) - ε)/2` where `x` is
/// its first dominating point.
pub fn reee_check(sample: &ParetoSample, eps: &[Scalar], eps_primes: &[Vec<Scalar>]) -> Result<ReeeReport> {
    check_dim(sample.r, eps.len())?;
    let zero = vec![Scalar::zero(); sample.r];
    for ep in eps_primes {
        check_dim(sample.r, ep.len())?;
        if !vdom_unchecked(&zero, ep, Preorder::LeNe) {
            return Err(Error::InvalidInput("ε′ must be nonnegative and nonzero".into()));
        }
    }
    let base = eff_set(sample, eps, SigmaKind::E)?;
    let mut monotonicity_violations = Vec::new();
    for ep in eps_primes {
        let sum: Vec<Scalar> = eps.iter().zip(ep).map(|(a, b)| a + b).collect();
        let wider = eff_set(sample, &sum, SigmaKind::E)?;
        for &i in &base {
            if !wider.contains(&i) {
                monotonicity_violations.push((ep.clone(), i));
            }
        }
    }
    let mut witnesses = Vec::new();
    for (i, y) in sample.images.iter().enumerate() {
        let Some(y) = y else { continue };
        if base.contains(&i) {
            continue;
        }
        let z = shifted(y, eps);
        let Some(j) = sample
            .images
            .iter()
            .position(|o| o.as_ref().is_some_and(|o| vdom_unchecked(o, &z, Preorder::LeNe)))
        else {
            continue;
        };
        let yj = sample.images[j].as_ref().expect("finite");
        let eps_prime: Vec<Scalar> = z
            .iter()
            .zip(yj)
            .map(|(a, b)| (a - b) / Scalar::from_int(2))
            .collect();
        let sum: Vec<Scalar> = eps.iter().zip(&eps_prime).map(|(a, b)| a + b).collect();
        let confirmed = vdom_unchecked(&zero, &eps_prime, Preorder::LeNe)
            && !eff_set(sample, &sum, SigmaKind::E)?.contains(&i);
        witnesses.push(ExclusionWitness {
            excluded: i,
            dominating: j,
            eps_prime,
            confirmed,
        });
    }
    let witness_failures = witnesses.iter().filter(|w| !w.confirmed).count();
    Ok(ReeeReport {
        monotonicity_violations,
        witnesses,
        witness_failures,
    })
}

/// `A ∈ ∂^s_ε F(x̄)` for `F = (f_1, …, f_r)`, decided row by row and
/// cross-checked between membership LPs and generator containment.
pub fn product_rule_check(
    fs: &[PolyhedralConvexFunction],
    xbar: &[Scalar],
    eps: &[Scalar],
    a: &[Vec<Scalar>],
) -> Result<bool> {
    check_dim(fs.len(), eps.len())?;
    check_dim(fs.len(), a.len())?;
    let mut by_member = true;
    let mut by_vrep = true;
    for ((f, e), row) in fs.iter().zip(eps).zip(a) {
        check_dim(f.dim(), row.len())?;
        let q = SubdiffQuery::new(f.clone(), xbar.to_vec(), e.clone())?;
        by_member &= subdiff_member(&q, row)?;
        let v: VPolytope = subdiff_vrep(&q)?;
        by_vrep &= v.contains(row)?;
    }
    if by_member != by_vrep {
        return Err(Error::Inconsistent(
            "membership and generator routes disagree".into(),
        ));
    }
    Ok(by_member)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarizationReport {
    /// `λ₁A₁ + λ₂A₂ ∈ ∂_{⟨λ,ε⟩}(λ₁f)(x̄)`.
    pub scalar_side: bool,
    /// No `x` with `F(x) - F(x̄) - A(x - x̄) + ε < 0` componentwise.
    pub weak_member: bool,
    pub implication_holds: bool,
}

/// For `F = (f, 0)`: if the scalarized row lies in the scalarized
/// ε-subdifferential then `A` is a weak ε-subgradient of `F`.
pub fn scalarization_check(
    f: &PolyhedralConvexFunction,
    xbar: &[Scalar],
    eps: &[Scalar; 2],
    a: &[Vec<Scalar>; 2],
    lambda: &[Scalar; 2],
) -> Result<ScalarizationReport> {
    let n = f.dim();
    check_dim(n, xbar.len())?;
    check_dim(n, a[0].len())?;
    check_dim(n, a[1].len())?;
    if lambda.iter().any(Scalar::is_negative) || lambda.iter().all(Scalar::is_zero) {
        return Err(Error::InvalidInput("weights must be nonnegative and not all zero".into()));
    }
    let Some(fx) = f.value(xbar) else {
        return Err(Error::InvalidInput("point lies outside dom f".into()));
    };

    let combined = if lambda[0].is_zero() {
        PolyhedralConvexFunction::new(
            n,
            vec![AffineForm::new(vec![Scalar::zero(); n], Scalar::zero())],
            f.domain().cloned(),
        )?
    } else {
        f.scaled(&lambda[0])
    };
    let row: Vec<Scalar> = (0..n)
        .map(|c| &lambda[0] * &a[0][c] + &lambda[1] * &a[1][c])
        .collect();
    let weight = &lambda[0] * &eps[0] + &lambda[1] * &eps[1];
    let scalar_side = subdiff_member(&SubdiffQuery::new(combined, xbar.to_vec(), weight)?, &row)?;

    // Variables (x, t, τ): maximize τ with
    //   t - ⟨A₁, x⟩ + τ ≤ f(x̄) - ⟨A₁, x̄⟩ - ε₁,
    //   -⟨A₂, x⟩ + τ ≤ -⟨A₂, x̄⟩ - ε₂.
    let mut lp = LinearProgram::new(n + 2);
    f.add_epigraph(&mut lp, 0, n);
    let mut first: Vec<(usize, Scalar)> = (0..n).map(|c| (c, -&a[0][c])).collect();
    first.push((n, Scalar::one()));
    first.push((n + 1, Scalar::one()));
    lp.add_sparse(&first, Relation::Le, &fx - dot(&a[0], xbar) - &eps[0]);
    let mut second: Vec<(usize, Scalar)> = (0..n).map(|c| (c, -&a[1][c])).collect();
    second.push((n + 1, Scalar::one()));
    lp.add_sparse(&second, Relation::Le, -dot(&a[1], xbar) - &eps[1]);
    let (sup, _) = lp_max_component(&lp, n + 1)?;
    let weak_member = !sup.is_positive();
    Ok(ScalarizationReport {
        scalar_side,
        weak_member,
        implication_holds: !scalar_side || weak_member,
    })
}
