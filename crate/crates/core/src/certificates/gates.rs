//! Applicability checks run before any membership test.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::lp::{lp_max_component, lp_solve, LinearProgram, LpOutcome, Sense};
use crate::model::PolyhedralConvexFunction;
use crate::scalar::{Extended, Scalar};

/// Outcome of the essential-assumption test `inf_R f < f(x̄) - ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialCheck {
    pub holds: bool,
    /// Infimum of `f` over the region; `+inf` when the region misses `dom f`.
    pub infimum: Extended,
    pub threshold: Scalar,
}

/// Outcome of the Slater test for `G ≤ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlaterCheck {
    pub holds: bool,
    /// Supremum of the uniform slack `τ` with `g_j ≤ -τ`.
    pub supremum: Extended,
}

/// `inf f(x)` over `{x : φ(x) ≤ 0 for every φ in region}`.
pub fn infimum_over(f: &PolyhedralConvexFunction, region: &[PolyhedralConvexFunction]) -> Result<(Extended, LpOutcome)> {
    let n = f.dim();
    for r in region {
        check_dim(n, r.dim())?;
    }
    let mut lp = LinearProgram::new(n + 1);
    f.add_epigraph(&mut lp, 0, n);
    for r in region {
        r.add_sublevel(&mut lp, 0, &[]);
    }
    let mut c = vec![Scalar::zero(); n + 1];
    c[n] = Scalar::one();
    let lp = lp.minimize(c);
    let outcome = lp_solve(&lp)?;
    Ok((outcome.extended_value(Sense::Minimize), outcome))
}

/// Essential assumption: `inf f < f(x̄) - ε` over the region given by the
/// sublevel sets `{φ ≤ 0}` (an empty list is the whole space).
pub fn essential_check(
    f: &PolyhedralConvexFunction,
    region: &[PolyhedralConvexFunction],
    xbar: &[Scalar],
    eps: &Scalar,
) -> Result<EssentialCheck> {
    check_dim(f.dim(), xbar.len())?;
    let fx = f.value(xbar).ok_or_else(|| {
        crate::error::Error::InvalidInput("point lies outside dom f".into())
    })?;
    let threshold = fx - eps;
    let (infimum, _) = infimum_over(f, region)?;
    let holds = infimum < Extended::Finite(threshold.clone());
    Ok(EssentialCheck {
        holds,
        infimum,
        threshold,
    })
}

/// Slater condition: some `x₀ ∈ dom f ∩ dom G` has `g_j(x₀) < 0` for all `j`.
pub fn slater_check(g: &[PolyhedralConvexFunction], f: &PolyhedralConvexFunction) -> Result<SlaterCheck> {
    let n = f.dim();
    for gj in g {
        check_dim(n, gj.dim())?;
    }
    if g.is_empty() {
        return Ok(SlaterCheck {
            holds: true,
            supremum: Extended::PosInfinity,
        });
    }
    let mut lp = LinearProgram::new(n + 1);
    if let Some(d) = f.domain() {
        d.add_to_lp(&mut lp, 0);
    }
    for gj in g {
        gj.add_sublevel(&mut lp, 0, &[(n, Scalar::one())]);
    }
    let (supremum, _) = lp_max_component(&lp, n)?;
    Ok(SlaterCheck {
        holds: supremum.is_positive(),
        supremum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ivec;

    fn f(pieces: &[(&[i64], i64)]) -> PolyhedralConvexFunction {
        PolyhedralConvexFunction::from_int_pieces(pieces).unwrap()
    }

    #[test]
    fn essential_examples() {
        let abs = f(&[(&[1], 0), (&[-1], 0)]);
        let x = ivec(&[1]);
        assert!(essential_check(&abs, &[], &x, &Scalar::zero()).unwrap().holds);
        assert!(!essential_check(&abs, &[], &x, &Scalar::one()).unwrap().holds);
        let g = f(&[(&[2], 0), (&[-1], 0)]);
        let h = f(&[(&[1], -1), (&[-1], -1)]);
        let e = essential_check(&g, &[h], &x, &Scalar::zero()).unwrap();
        assert!(e.holds);
        assert_eq!(e.infimum, Extended::Finite(Scalar::zero()));
    }

    #[test]
    fn essential_on_empty_region_fails() {
        let abs = f(&[(&[1], 0), (&[-1], 0)]);
        let empty = f(&[(&[0], 1)]);
        let e = essential_check(&abs, &[empty], &ivec(&[1]), &Scalar::zero()).unwrap();
        assert!(!e.holds);
        assert_eq!(e.infimum, Extended::PosInfinity);
    }

    #[test]
    fn essential_unbounded_below_holds() {
        let lin = f(&[(&[1], 0)]);
        let e = essential_check(&lin, &[], &ivec(&[0]), &Scalar::from_int(100)).unwrap();
        assert!(e.holds);
        assert_eq!(e.infimum, Extended::NegInfinity);
    }

    #[test]
    fn slater_examples() {
        let obj = f(&[(&[1], 0), (&[-1], 0)]);
        assert!(slater_check(&[f(&[(&[1], -1)])], &obj).unwrap().holds);
        assert!(!slater_check(&[f(&[(&[1], 0), (&[-1], 0)])], &obj).unwrap().holds);
        assert!(slater_check(&[f(&[(&[1], 0)]), f(&[(&[-1], -2)])], &obj).unwrap().holds);
    }
}
