//! Fenchel ε-subdifferentials of polyhedral convex functions.
//!
//! For `f = max_i (⟨a_i, ·⟩ + b_i)` on `{C x ≤ d}`, LP duality gives
//!
//! ```text
//! ∂_ε f(x̄) = { Σ λ_i a_i + Cᵀη : λ ≥ 0, Σ λ_i = 1, η ≥ 0,
//!              Σ λ_i (f(x̄) - a_i·x̄ - b_i) + Σ η_r (d_r - C_r·x̄) ≤ ε }.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lp::{lp_solve, LinearProgram, LpOutcome};
use crate::model::{HPolyhedron, PolyhedralConvexFunction};
use crate::polytope::{project, VPolytope};
use crate::scalar::{dot, Scalar};

/// `∂_ε f(x̄)` as a query object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdiffQuery {
    function: PolyhedralConvexFunction,
    point: Vec<Scalar>,
    eps: Scalar,
}

impl SubdiffQuery {
    pub fn new(function: PolyhedralConvexFunction, point: Vec<Scalar>, eps: Scalar) -> Result<Self> {
        check_dim(function.dim(), point.len())?;
        if eps.is_negative() {
            return Err(Error::InvalidInput("epsilon must be nonnegative".into()));
        }
        Ok(SubdiffQuery {
            function,
            point,
            eps,
        })
    }

    pub fn function(&self) -> &PolyhedralConvexFunction {
        &self.function
    }

    pub fn point(&self) -> &[Scalar] {
        &self.point
    }

    pub fn eps(&self) -> &Scalar {
        &self.eps
    }

    /// False when `x̄ ∉ dom f`, in which case the subdifferential is empty.
    pub fn point_in_domain(&self) -> bool {
        self.function.in_domain(&self.point)
    }
}

/// Does `f(x) ≥ f(x̄) + ⟨s, x - x̄⟩ - ε` hold for every `x`?
///
/// Decided by minimizing `t - ⟨s, x⟩` over the epigraph of `f`.
pub fn subdiff_member(q: &SubdiffQuery, s: &[Scalar]) -> Result<bool> {
    let n = q.function.dim();
    check_dim(n, s.len())?;
    let Some(fx) = q.function.value(&q.point) else {
        return Ok(false);
    };
    let mut lp = LinearProgram::new(n + 1);
    q.function.add_epigraph(&mut lp, 0, n);
    let mut c: Vec<Scalar> = s.iter().map(|v| -v).collect();
    c.push(Scalar::one());
    let lp = lp.minimize(c);
    let threshold = fx - dot(s, &q.point) - &q.eps;
    Ok(match lp_solve(&lp)? {
        LpOutcome::Optimal { value, .. } => value >= threshold,
        LpOutcome::Unbounded { .. } => false,
        LpOutcome::Infeasible { .. } => false,
    })
}

/// Generator representation of `∂_ε f(x̄)`, empty when `x̄ ∉ dom f`.
///
/// Enumerates the lifted system in `(λ, η, s)` and projects onto `s`.
pub fn subdiff_vrep(q: &SubdiffQuery) -> Result<VPolytope> {
    let n = q.function.dim();
    if !q.point_in_domain() {
        return Ok(VPolytope::empty(n));
    }
    let pieces = q.function.pieces();
    let k = pieces.len();
    let (dom_rows, dom_slacks): (Vec<Vec<Scalar>>, Vec<Scalar>) = match q.function.domain() {
        Some(d) => (d.rows().to_vec(), d.slacks(&q.point)),
        None => (Vec::new(), Vec::new()),
    };
    let m = dom_rows.len();
    let total = k + m + n;
    let gaps = q.function.gaps(&q.point);

    let unit = |j: usize, v: Scalar| {
        let mut e = vec![Scalar::zero(); total];
        e[j] = v;
        e
    };
    let mut sys = HPolyhedron::whole(total);
    for j in 0..k + m {
        sys.push(unit(j, -Scalar::one()), Scalar::zero())?;
    }
    for c in 0..n {
        let mut row = unit(k + m + c, Scalar::one());
        for (i, p) in pieces.iter().enumerate() {
            row[i] = -&p.a[c];
        }
        for (r, dr) in dom_rows.iter().enumerate() {
            row[k + r] = -&dr[c];
        }
        sys.push_equality(row, Scalar::zero())?;
    }
    let mut simplex = vec![Scalar::zero(); total];
    for v in simplex.iter_mut().take(k) {
        *v = Scalar::one();
    }
    sys.push_equality(simplex, Scalar::one())?;
    let mut budget = vec![Scalar::zero(); total];
    budget[..k].clone_from_slice(&gaps);
    budget[k..k + m].clone_from_slice(&dom_slacks);
    sys.push(budget, q.eps.clone())?;

    let keep: Vec<usize> = (k + m..total).collect();
    project(&sys, &keep)
}

/// Generator representation of `∂_ε(λ f)(x̄)`, computed as
/// `λ·∂_{ε/λ} f(x̄)` and cross-checked against the direct route.
pub fn scale_subdiff(q: &SubdiffQuery, lambda: &Scalar) -> Result<VPolytope> {
    if !lambda.is_positive() {
        return Err(Error::InvalidInput("scaling factor must be positive".into()));
    }
    let inner = SubdiffQuery::new(q.function.clone(), q.point.clone(), &q.eps / lambda)?;
    let scaled = subdiff_vrep(&inner)?.scaled(lambda);
    let direct = subdiff_vrep(&SubdiffQuery::new(
        q.function.scaled(lambda),
        q.point.clone(),
        q.eps.clone(),
    )?)?;
    if scaled == direct || scaled.same_set(&direct) {
        Ok(scaled)
    } else {
        Err(Error::Inconsistent(
            "scaled and direct subdifferentials differ".into(),
        ))
    }
}
