//! Brute-force ground truth on rational grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lp::{lp_solve, LinearProgram, LpOutcome};
use crate::model::{PolyhedralConvexFunction, ReverseProblem};
use crate::scalar::Scalar;

/// Default bound on the number of grid points.
pub const DEFAULT_POINT_CAP: usize = 1_000_000;

/// Axis-aligned rational grid `{l + k·step} ∩ [l, u]` per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    lower: Vec<Scalar>,
    upper: Vec<Scalar>,
    step: Scalar,
    counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(lower: Vec<Scalar>, upper: Vec<Scalar>, step: Scalar) -> Result<Self> {
        Self::with_cap(lower, upper, step, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(lower: Vec<Scalar>, upper: Vec<Scalar>, step: Scalar, cap: usize) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if !step.is_positive() {
            return Err(Error::InvalidInput("grid step must be positive".into()));
        }
        let mut counts = Vec::with_capacity(lower.len());
        let mut total: usize = 1;
        for (l, u) in lower.iter().zip(&upper) {
            if l > u {
                return Err(Error::InvalidInput(format!("empty grid interval [{l}, {u}]")));
            }
            let k = (u - l) / &step;
            if !k.is_integer() {
                return Err(Error::InvalidInput(format!(
                    "interval [{l}, {u}] is not a multiple of the step {step}"
                )));
            }
            let per: usize = k
                .numer()
                .try_into()
                .ok()
                .and_then(|c: usize| c.checked_add(1))
                .filter(|&c| c <= cap)
                .ok_or_else(|| Error::InvalidInput("grid exceeds the point cap".into()))?;
            total = total
                .checked_mul(per)
                .filter(|&t| t <= cap)
                .ok_or_else(|| Error::InvalidInput("grid exceeds the point cap".into()))?;
            counts.push(per);
        }
        Ok(GridSpec {
            lower,
            upper,
            step,
            counts,
        })
    }

    /// The cube `[l, u]^dim`.
    pub fn cube(dim: usize, lower: Scalar, upper: Scalar, step: Scalar) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim], step)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[Scalar] {
        &self.lower
    }

    pub fn upper(&self) -> &[Scalar] {
        &self.upper
    }

    pub fn step(&self) -> &Scalar {
        &self.step
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `idx`-th point in row-major order (last coordinate fastest).
    pub fn point(&self, idx: usize) -> Vec<Scalar> {
        let mut rest = idx;
        let mut out = vec![Scalar::zero(); self.dim()];
        for c in (0..self.dim()).rev() {
            let k = rest % self.counts[c];
            rest /= self.counts[c];
            out[c] = &self.lower[c] + &self.step * Scalar::from_int(k as i64);
        }
        out
    }

    pub fn points(&self) -> Vec<Vec<Scalar>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Does the box contain `x`?
    pub fn box_contains(&self, x: &[Scalar]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v <= u)
    }
}

/// Feasible region enumerated by the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    /// `h ≥ 0`.
    Reverse,
    /// `h = 0`.
    Equality,
    /// `h ≥ 0` and `G ≤ 0`.
    ConstrainedReverse,
    /// `h ≤ 0`.
    Convex,
}

impl std::str::FromStr for OracleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reverse" | "rop" => Ok(OracleMode::Reverse),
            "equality" => Ok(OracleMode::Equality),
            "constrained-reverse" | "constrained" => Ok(OracleMode::ConstrainedReverse),
            "convex" => Ok(OracleMode::Convex),
            other => Err(Error::Parse(format!("unknown oracle mode `{other}`"))),
        }
    }
}

/// A grid point within `ε` of the grid minimum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    pub point: Vec<Scalar>,
    pub value: Scalar,
    /// `min + ε - f(x)`.
    pub slack: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteResult {
    pub mode: OracleMode,
    pub grid_points: usize,
    pub feasible_points: usize,
    /// `None` when no grid point is feasible.
    pub min_value: Option<Scalar>,
    pub eps_argmin: Vec<GridPoint>,
    /// `L·step`, the largest amount by which the grid minimum can exceed
    /// the true infimum over the box.
    pub error_bound: Scalar,
}

impl BruteResult {
    pub fn is_empty(&self) -> bool {
        self.min_value.is_none()
    }
}

fn feasible(problem: &ReverseProblem, mode: OracleMode, x: &[Scalar]) -> Option<Scalar> {
    let fx = problem.objective().value(x)?;
    let hx = problem.reverse().value(x);
    let ok = match mode {
        OracleMode::Reverse => hx.is_some_and(|v| !v.is_negative()),
        OracleMode::Equality => hx.is_some_and(|v| v.is_zero()),
        OracleMode::ConstrainedReverse => {
            hx.is_some_and(|v| !v.is_negative())
                && problem
                    .constraints()
                    .iter()
                    .all(|g| g.value(x).is_some_and(|v| !v.is_positive()))
        }
        OracleMode::Convex => hx.is_some_and(|v| !v.is_positive()),
    };
    ok.then_some(fx)
}

/// Exact minimum of `f` over the feasible grid points and all points within
/// `ε` (the problem's tolerance) of it.
pub fn brute_eps_argmin(problem: &ReverseProblem, mode: OracleMode, grid: &GridSpec) -> Result<BruteResult> {
    check_dim(problem.dim(), grid.dim())?;
    let values: Vec<Option<Scalar>> = (0..grid.len())
        .into_par_iter()
        .map(|i| feasible(problem, mode, &grid.point(i)))
        .collect();
    let feasible_points = values.iter().filter(|v| v.is_some()).count();
    let min_value = values.iter().flatten().min().cloned();
    let mut eps_argmin = Vec::new();
    if let Some(m) = &min_value {
        let cut = m + problem.epsilon();
        for (i, v) in values.iter().enumerate() {
            if let Some(v) = v {
                if v <= &cut {
                    eps_argmin.push(GridPoint {
                        point: grid.point(i),
                        value: v.clone(),
                        slack: &cut - v,
                    });
                }
            }
        }
    }
    Ok(BruteResult {
        mode,
        grid_points: grid.len(),
        feasible_points,
        min_value,
        eps_argmin,
        error_bound: problem.objective().lipschitz_bound() * grid.step(),
    })
}

/// The point of `h = 0` on the segment from `x` towards `y` nearest to `x`.
///
/// Requires `h(x) > 0`, `h(y) < 0` and `f(y) < f(x)`; the result satisfies
/// `h(π) = 0` and `f(π) < f(x)` exactly.
pub fn boundary_projection(
    f: &PolyhedralConvexFunction,
    h: &PolyhedralConvexFunction,
    x: &[Scalar],
    y: &[Scalar],
) -> Result<Vec<Scalar>> {
    check_dim(h.dim(), x.len())?;
    check_dim(h.dim(), y.len())?;
    let (Some(hx), Some(hy)) = (h.value(x), h.value(y)) else {
        return Err(Error::InvalidInput("segment endpoints must lie in dom h".into()));
    };
    if !hx.is_positive() {
        return Err(Error::InvalidInput("boundary projection needs h(x) > 0".into()));
    }
    if !hy.is_negative() {
        return Err(Error::InvalidInput("boundary projection needs h(y) < 0".into()));
    }
    let (Some(fx), Some(fy)) = (f.value(x), f.value(y)) else {
        return Err(Error::InvalidInput("segment endpoints must lie in dom f".into()));
    };
    if fy >= fx {
        return Err(Error::InvalidInput("boundary projection needs f(y) < f(x)".into()));
    }
    // Along z(t) = x + t(y - x), each piece is affine in t; h(z(t)) first
    // reaches zero when the last positive piece does.
    let mut t_star = Scalar::zero();
    for p in h.pieces() {
        let at0 = p.value(x);
        let at1 = p.value(y);
        if at0.is_positive() {
            let t = &at0 / (&at0 - &at1);
            t_star = Scalar::max_of(&t_star, &t);
        }
    }
    let pi: Vec<Scalar> = x.iter().zip(y).map(|(a, b)| a + &t_star * (b - a)).collect();
    let on_boundary = h.value(&pi).is_some_and(|v| v.is_zero());
    let improves = f.value(&pi).is_some_and(|v| v < fx);
    if !on_boundary || !improves {
        return Err(Error::Inconsistent(
            "boundary projection failed its exact post-conditions".into(),
        ));
    }
    Ok(pi)
}

/// Exact minimizer of `f` over the grid box.
pub fn box_minimizer(f: &PolyhedralConvexFunction, grid: &GridSpec) -> Result<Option<Vec<Scalar>>> {
    let n = f.dim();
    check_dim(n, grid.dim())?;
    let mut lp = LinearProgram::new(n + 1);
    f.add_epigraph(&mut lp, 0, n);
    for c in 0..n {
        lp.set_lower(c, grid.lower()[c].clone());
        lp.set_upper(c, grid.upper()[c].clone());
    }
    let mut obj = vec![Scalar::zero(); n + 1];
    obj[n] = Scalar::one();
    Ok(match lp_solve(&lp.minimize(obj))? {
        LpOutcome::Optimal { x, .. } => Some(x[..n].to_vec()),
        _ => None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEquivalenceReport {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Box minimizer of `f` used as the interior point of every projection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<Scalar>>,
    /// Minimum over `{h = 0}`: boundary grid points and projections.
    pub boundary_min: Option<Scalar>,
    /// Minimum over `{h ≥ 0}`: feasible grid points and projections.
    pub reverse_min: Option<Scalar>,
    /// Grid points of the ε-argmin over `{h = 0}`.
    pub boundary_argmin: Vec<Vec<Scalar>>,
    /// Grid points of the ε-argmin over `{h ≥ 0}` lying on `{h = 0}`.
    pub reverse_argmin_on_boundary: Vec<Vec<Scalar>>,
    pub symmetric_difference: Vec<Vec<Scalar>>,
}

impl BoundaryEquivalenceReport {
    fn inapplicable(note: &str) -> Self {
        BoundaryEquivalenceReport {
            applicable: false,
            note: Some(note.to_string()),
            anchor: None,
            boundary_min: None,
            reverse_min: None,
            boundary_argmin: Vec::new(),
            reverse_argmin_on_boundary: Vec::new(),
            symmetric_difference: Vec::new(),
        }
    }
}

/// Compares the ε-argmin over `{h = 0}` with the ε-argmin over `{h ≥ 0}`
/// restricted to `{h = 0}`, on the grid. Every grid point with `h > 0`
/// contributes its boundary projection to both minima.
pub fn boundary_equivalence_check(
    f: &PolyhedralConvexFunction,
    h: &PolyhedralConvexFunction,
    grid: &GridSpec,
    eps: &Scalar,
) -> Result<BoundaryEquivalenceReport> {
    check_dim(f.dim(), grid.dim())?;
    check_dim(h.dim(), grid.dim())?;
    if f.domain().is_some() || h.domain().is_some() {
        return Ok(BoundaryEquivalenceReport::inapplicable("functions must be finite-valued"));
    }
    let Some(y) = box_minimizer(f, grid)? else {
        return Ok(BoundaryEquivalenceReport::inapplicable("no minimizer over the box"));
    };
    if !h.max_piece(&y).is_negative() {
        return Ok(BoundaryEquivalenceReport::inapplicable(
            "the box minimizer of f is not in {h < 0}",
        ));
    }
    let pts = grid.points();
    let vals: Vec<(Scalar, Scalar)> = pts
        .par_iter()
        .map(|x| (f.max_piece(x), h.max_piece(x)))
        .collect();
    let grid_min = vals.iter().map(|(v, _)| v).min().cloned();
    let reverse_grid_min = vals.iter().filter(|(_, hv)| !hv.is_negative()).map(|(v, _)| v).min().cloned();
    match (&grid_min, &reverse_grid_min) {
        (Some(a), Some(b)) if a < b => {}
        _ => {
            return Ok(BoundaryEquivalenceReport::inapplicable(
                "essential assumption does not hold on the grid",
            ))
        }
    }
    let fy = f.max_piece(&y);
    let projected: Vec<Scalar> = pts
        .par_iter()
        .zip(&vals)
        .filter(|(_, (fv, hv))| hv.is_positive() && &fy < fv)
        .map(|(x, _)| boundary_projection(f, h, x, &y).map(|p| f.max_piece(&p)))
        .collect::<Result<Vec<_>>>()?;
    let proj_min = projected.iter().min().cloned();
    let boundary_grid_min = vals.iter().filter(|(_, hv)| hv.is_zero()).map(|(v, _)| v).min().cloned();
    let lower = |a: Option<Scalar>, b: Option<Scalar>| match (a, b) {
        (Some(a), Some(b)) => Some(Scalar::min_of(&a, &b)),
        (a, b) => a.or(b),
    };
    let boundary_min = lower(boundary_grid_min, proj_min.clone());
    let reverse_min = lower(reverse_grid_min, proj_min);
    let select = |m: &Option<Scalar>| -> Vec<Vec<Scalar>> {
        let Some(m) = m else { return Vec::new() };
        let cut = m + eps;
        pts.iter()
            .zip(&vals)
            .filter(|(_, (fv, hv))| hv.is_zero() && fv <= &cut)
            .map(|(x, _)| x.clone())
            .collect()
    };
    let boundary_argmin = select(&boundary_min);
    let reverse_argmin_on_boundary = select(&reverse_min);
    let symmetric_difference = boundary_argmin
        .iter()
        .filter(|x| !reverse_argmin_on_boundary.contains(x))
        .chain(
            reverse_argmin_on_boundary
                .iter()
                .filter(|x| !boundary_argmin.contains(x)),
        )
        .cloned()
        .collect();
    Ok(BoundaryEquivalenceReport {
        applicable: true,
        note: None,
        anchor: Some(y),
        boundary_min,
        reverse_min,
        boundary_argmin,
        reverse_argmin_on_boundary,
        symmetric_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ivec;

    fn f(pieces: &[(&[i64], i64)]) -> PolyhedralConvexFunction {
        PolyhedralConvexFunction::from_int_pieces(pieces).unwrap()
    }

    const ABS: &[(&[i64], i64)] = &[(&[1], 0), (&[-1], 0)];
    const B: &[(&[i64], i64)] = &[(&[2], 0), (&[-1], 0)];
    const H: &[(&[i64], i64)] = &[(&[1], -1), (&[-1], -1)];

    fn grid() -> GridSpec {
        GridSpec::cube(1, Scalar::from_int(-3), Scalar::from_int(3), Scalar::frac(1, 4)).unwrap()
    }

    fn problem(obj: &[(&[i64], i64)], eps: Scalar) -> ReverseProblem {
        ReverseProblem::new(1, f(obj), f(H), Vec::new(), ivec(&[1]), eps).unwrap()
    }

    fn argmin(r: &BruteResult) -> Vec<Vec<Scalar>> {
        r.eps_argmin.iter().map(|p| p.point.clone()).collect()
    }

    #[test]
    fn grid_shape() {
        let g = grid();
        assert_eq!(g.len(), 25);
        assert_eq!(g.point(0), ivec(&[-3]));
        assert_eq!(g.point(24), ivec(&[3]));
        let g2 = GridSpec::cube(2, Scalar::zero(), Scalar::one(), Scalar::frac(1, 2)).unwrap();
        assert_eq!(g2.len(), 9);
        assert_eq!(g2.point(1), vec![Scalar::zero(), Scalar::frac(1, 2)]);
        assert!(GridSpec::cube(1, Scalar::zero(), Scalar::one(), Scalar::frac(2, 3)).is_err());
        assert!(GridSpec::with_cap(vec![Scalar::zero()], vec![Scalar::from_int(10)], Scalar::one(), 5).is_err());
    }

    #[test]
    fn brute_examples() {
        let r = brute_eps_argmin(&problem(ABS, Scalar::zero()), OracleMode::Reverse, &grid()).unwrap();
        assert_eq!(r.min_value, Some(Scalar::one()));
        assert_eq!(argmin(&r), vec![ivec(&[-1]), ivec(&[1])]);
        assert_eq!(r.error_bound, Scalar::frac(1, 4));

        let r = brute_eps_argmin(&problem(ABS, Scalar::frac(1, 2)), OracleMode::Reverse, &grid()).unwrap();
        let expect: Vec<Vec<Scalar>> = [(-3, 2), (-5, 4), (-1, 1), (1, 1), (5, 4), (3, 2)]
            .iter()
            .map(|&(p, q)| vec![Scalar::frac(p, q)])
            .collect();
        assert_eq!(argmin(&r), expect);

        let r = brute_eps_argmin(&problem(B, Scalar::zero()), OracleMode::Reverse, &grid()).unwrap();
        assert_eq!(r.min_value, Some(Scalar::one()));
        assert_eq!(argmin(&r), vec![ivec(&[-1])]);
    }

    #[test]
    fn equality_subset_of_reverse() {
        for obj in [ABS, B] {
            let p = problem(obj, Scalar::one());
            let eq = brute_eps_argmin(&p, OracleMode::Equality, &grid()).unwrap();
            let rev = brute_eps_argmin(&p, OracleMode::Reverse, &grid()).unwrap();
            for g in &eq.eps_argmin {
                assert!(rev.eps_argmin.iter().any(|r| r.point == g.point));
            }
        }
    }

    #[test]
    fn empty_feasible_set() {
        let p = ReverseProblem::new(1, f(ABS), f(&[(&[0], -1)]), Vec::new(), ivec(&[0]), Scalar::zero()).unwrap();
        let r = brute_eps_argmin(&p, OracleMode::Reverse, &grid()).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.feasible_points, 0);
    }

    #[test]
    fn projection_examples() {
        let (fa, h) = (f(ABS), f(H));
        assert_eq!(boundary_projection(&fa, &h, &ivec(&[2]), &ivec(&[0])).unwrap(), ivec(&[1]));
        assert_eq!(boundary_projection(&fa, &h, &ivec(&[-3]), &ivec(&[0])).unwrap(), ivec(&[-1]));
        assert!(boundary_projection(&fa, &h, &ivec(&[1]), &ivec(&[0])).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let h = f(H);
        let r = boundary_equivalence_check(&f(ABS), &h, &grid(), &Scalar::zero()).unwrap();
        assert!(r.applicable);
        assert_eq!(r.boundary_argmin, vec![ivec(&[-1]), ivec(&[1])]);
        assert!(r.symmetric_difference.is_empty());
        let r = boundary_equivalence_check(&f(B), &h, &grid(), &Scalar::zero()).unwrap();
        assert_eq!(r.boundary_argmin, vec![ivec(&[-1])]);
        assert!(r.symmetric_difference.is_empty());
        let r = boundary_equivalence_check(&f(B), &h, &grid(), &Scalar::one()).unwrap();
        assert_eq!(r.boundary_argmin, vec![ivec(&[-1]), ivec(&[1])]);
        assert_eq!(r.reverse_argmin_on_boundary, r.boundary_argmin);
    }
}
