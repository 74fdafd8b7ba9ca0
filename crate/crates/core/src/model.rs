//! Problem data: affine pieces, inequality-described polyhedra, polyhedral
//! convex functions and the reverse convex program itself.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use crate::scalar::{dot, Extended, Scalar};

/// `x ↦ ⟨a, x⟩ + b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineForm {
    pub a: Vec<Scalar>,
    pub b: Scalar,
}

impl AffineForm {
    pub fn new(a: Vec<Scalar>, b: Scalar) -> Self {
        AffineForm { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn value(&self, x: &[Scalar]) -> Scalar {
        dot(&self.a, x) + &self.b
    }

    pub fn scaled(&self, lambda: &Scalar) -> AffineForm {
        AffineForm {
            a: self.a.iter().map(|v| v * lambda).collect(),
            b: &self.b * lambda,
        }
    }
}

/// `{x : A x ≤ b}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HPolyhedron {
    dim: usize,
    rows: Vec<Vec<Scalar>>,
    rhs: Vec<Scalar>,
}

impl HPolyhedron {
    pub fn new(dim: usize, rows: Vec<Vec<Scalar>>, rhs: Vec<Scalar>) -> Result<Self> {
        check_dim(rows.len(), rhs.len())?;
        for r in &rows {
            check_dim(dim, r.len())?;
        }
        Ok(HPolyhedron { dim, rows, rhs })
    }

    /// The whole space `R^dim` (no rows).
    pub fn whole(dim: usize) -> Self {
        HPolyhedron {
            dim,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Scalar] {
        &self.rhs
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn push(&mut self, row: Vec<Scalar>, rhs: Scalar) -> Result<()> {
        check_dim(self.dim, row.len())?;
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    /// Adds `row·x = rhs` as two inequalities.
    pub fn push_equality(&mut self, row: Vec<Scalar>, rhs: Scalar) -> Result<()> {
        let neg: Vec<Scalar> = row.iter().map(|v| -v).collect();
        self.push(row, rhs.clone())?;
        self.push(neg, -rhs)
    }

    /// Exact membership by row evaluation.
    pub fn contains(&self, x: &[Scalar]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &[Scalar]) -> bool {
        self.rows
            .iter()
            .zip(&self.rhs)
            .all(|(r, b)| &dot(r, x) <= b)
    }

    /// Slack `b_i - ⟨A_i, x⟩` per row.
    pub fn slacks(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| b - dot(r, x))
            .collect()
    }

    /// Appends the rows over the first `dim` variables of a wider program.
    pub(crate) fn add_to_lp(&self, lp: &mut LinearProgram, offset: usize) {
        for (r, b) in self.rows.iter().zip(&self.rhs) {
            let terms: Vec<(usize, Scalar)> = r
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (offset + j, v.clone()))
                .collect();
            lp.add_sparse(&terms, Relation::Le, b.clone());
        }
    }

    /// Emptiness test by one feasibility LP.
    pub fn is_empty(&self) -> bool {
        if self.rows.is_empty() {
            return false;
        }
        let mut lp = LinearProgram::new(self.dim);
        self.add_to_lp(&mut lp, 0);
        matches!(lp_solve(&lp), Ok(LpOutcome::Infeasible { .. }))
    }
}

/// `x ↦ max_i ⟨a_i, x⟩ + b_i` on an optional polyhedral domain, `+∞` off it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyhedralConvexFunction {
    dim: usize,
    pieces: Vec<AffineForm>,
    domain: Option<HPolyhedron>,
}

impl PolyhedralConvexFunction {
    pub fn new(dim: usize, pieces: Vec<AffineForm>, domain: Option<HPolyhedron>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput(
                "a polyhedral function needs at least one piece".into(),
            ));
        }
        for p in &pieces {
            check_dim(dim, p.dim())?;
        }
        if let Some(d) = &domain {
            check_dim(dim, d.dim())?;
            if d.is_empty() {
                return Err(Error::InvalidInput("function domain is empty".into()));
            }
        }
        Ok(PolyhedralConvexFunction {
            dim,
            pieces,
            domain,
        })
    }

    /// Finite-valued function from `(a, b)` integer pieces; handy in tests.
    pub fn from_int_pieces(pieces: &[(&[i64], i64)]) -> Result<Self> {
        let dim = pieces.first().map_or(0, |p| p.0.len());
        let forms = pieces
            .iter()
            .map(|(a, b)| AffineForm::new(crate::scalar::ivec(a), Scalar::from_int(*b)))
            .collect();
        Self::new(dim, forms, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[AffineForm] {
        &self.pieces
    }

    pub fn domain(&self) -> Option<&HPolyhedron> {
        self.domain.as_ref()
    }

    pub fn with_domain(mut self, domain: HPolyhedron) -> Result<Self> {
        check_dim(self.dim, domain.dim())?;
        if domain.is_empty() {
            return Err(Error::InvalidInput("function domain is empty".into()));
        }
        self.domain = Some(domain);
        Ok(self)
    }

    pub fn in_domain(&self, x: &[Scalar]) -> bool {
        self.domain
            .as_ref()
            .is_none_or(|d| d.contains_unchecked(x))
    }

    /// Max over pieces, ignoring the domain.
    pub fn max_piece(&self, x: &[Scalar]) -> Scalar {
        self.pieces
            .iter()
            .map(|p| p.value(x))
            .max()
            .expect("pieces nonempty")
    }

    pub fn eval(&self, x: &[Scalar]) -> Result<Extended> {
        check_dim(self.dim, x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Scalar]) -> Extended {
        if self.in_domain(x) {
            Extended::Finite(self.max_piece(x))
        } else {
            Extended::PosInfinity
        }
    }

    /// Finite value, or `None` off the domain.
    pub fn value(&self, x: &[Scalar]) -> Option<Scalar> {
        if x.len() == self.dim && self.in_domain(x) {
            Some(self.max_piece(x))
        } else {
            None
        }
    }

    /// Largest 1-norm of a piece gradient; bounds `|f(x) - f(y)|` by
    /// `L·‖x - y‖_∞` on the domain.
    pub fn lipschitz_bound(&self) -> Scalar {
        self.pieces
            .iter()
            .map(|p| p.a.iter().map(Scalar::abs).sum::<Scalar>())
            .max()
            .expect("pieces nonempty")
    }

    /// `λ·f` with every piece scaled; the domain is unchanged.
    pub fn scaled(&self, lambda: &Scalar) -> PolyhedralConvexFunction {
        PolyhedralConvexFunction {
            dim: self.dim,
            pieces: self.pieces.iter().map(|p| p.scaled(lambda)).collect(),
            domain: self.domain.clone(),
        }
    }

    /// `f(x̄) - (⟨a_i, x̄⟩ + b_i)` per piece, at a point of the domain.
    pub(crate) fn gaps(&self, x: &[Scalar]) -> Vec<Scalar> {
        let vals: Vec<Scalar> = self.pieces.iter().map(|p| p.value(x)).collect();
        let top = vals.iter().max().expect("pieces nonempty").clone();
        vals.into_iter().map(|v| &top - v).collect()
    }

    /// Adds epigraph rows `piece_i(x) - t ≤ 0` and domain rows to `lp`, with
    /// `x` at `x_offset` and `t` at `t_var`.
    pub(crate) fn add_epigraph(&self, lp: &mut LinearProgram, x_offset: usize, t_var: usize) {
        for p in &self.pieces {
            let mut terms: Vec<(usize, Scalar)> = p
                .a
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (x_offset + j, v.clone()))
                .collect();
            terms.push((t_var, -Scalar::one()));
            lp.add_sparse(&terms, Relation::Le, -&p.b);
        }
        if let Some(d) = &self.domain {
            d.add_to_lp(lp, x_offset);
        }
    }

    /// Adds `piece_i(x) + Σ extra ≤ 0` for every piece, plus the domain rows.
    pub(crate) fn add_sublevel(&self, lp: &mut LinearProgram, x_offset: usize, extra: &[(usize, Scalar)]) {
        for p in &self.pieces {
            let mut terms: Vec<(usize, Scalar)> = p
                .a
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (x_offset + j, v.clone()))
                .collect();
            terms.extend_from_slice(extra);
            lp.add_sparse(&terms, Relation::Le, -&p.b);
        }
        if let Some(d) = &self.domain {
            d.add_to_lp(lp, x_offset);
        }
    }
}

/// `ε-min f(x)` subject to `h(x) ≥ 0` and `g_j(x) ≤ 0`, at candidate `x̄`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReverseProblem {
    dim: usize,
    objective: PolyhedralConvexFunction,
    reverse: PolyhedralConvexFunction,
    constraints: Vec<PolyhedralConvexFunction>,
    point: Vec<Scalar>,
    epsilon: Scalar,
}

impl ReverseProblem {
    pub fn new(
        dim: usize,
        objective: PolyhedralConvexFunction,
        reverse: PolyhedralConvexFunction,
        constraints: Vec<PolyhedralConvexFunction>,
        point: Vec<Scalar>,
        epsilon: Scalar,
    ) -> Result<Self> {
        check_dim(dim, objective.dim())?;
        check_dim(dim, reverse.dim())?;
        for g in &constraints {
            check_dim(dim, g.dim())?;
        }
        check_dim(dim, point.len())?;
        if epsilon.is_negative() {
            return Err(Error::InvalidInput("epsilon must be nonnegative".into()));
        }
        Ok(ReverseProblem {
            dim,
            objective,
            reverse,
            constraints,
            point,
            epsilon,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn objective(&self) -> &PolyhedralConvexFunction {
        &self.objective
    }

    pub fn reverse(&self) -> &PolyhedralConvexFunction {
        &self.reverse
    }

    pub fn constraints(&self) -> &[PolyhedralConvexFunction] {
        &self.constraints
    }

    pub fn point(&self) -> &[Scalar] {
        &self.point
    }

    pub fn epsilon(&self) -> &Scalar {
        &self.epsilon
    }

    pub fn with_epsilon(&self, epsilon: Scalar) -> Result<Self> {
        let mut p = self.clone();
        if epsilon.is_negative() {
            return Err(Error::InvalidInput("epsilon must be nonnegative".into()));
        }
        p.epsilon = epsilon;
        Ok(p)
    }

    pub fn with_constraints(&self, constraints: Vec<PolyhedralConvexFunction>) -> Result<Self> {
        Self::new(
            self.dim,
            self.objective.clone(),
            self.reverse.clone(),
            constraints,
            self.point.clone(),
            self.epsilon.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ivec;
    use proptest::prelude::*;

    fn abs1() -> PolyhedralConvexFunction {
        PolyhedralConvexFunction::from_int_pieces(&[(&[1], 0), (&[-1], 0)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = abs1();
        assert_eq!(f.eval(&ivec(&[2])).unwrap(), Extended::Finite(Scalar::from_int(2)));
        assert_eq!(f.eval(&ivec(&[0])).unwrap(), Extended::Finite(Scalar::zero()));
        let g = PolyhedralConvexFunction::from_int_pieces(&[(&[1], 0)])
            .unwrap()
            .with_domain(HPolyhedron::new(1, vec![ivec(&[1])], ivec(&[1])).unwrap())
            .unwrap();
        assert_eq!(g.eval(&ivec(&[2])).unwrap(), Extended::PosInfinity);
        assert!(matches!(
            f.eval(&ivec(&[1, 2])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lipschitz_examples() {
        assert_eq!(abs1().lipschitz_bound(), Scalar::one());
        let f = PolyhedralConvexFunction::from_int_pieces(&[(&[2], 0), (&[-1], 0)]).unwrap();
        assert_eq!(f.lipschitz_bound(), Scalar::from_int(2));
        let g = PolyhedralConvexFunction::from_int_pieces(&[(&[3, -1], 1)]).unwrap();
        assert_eq!(g.lipschitz_bound(), Scalar::from_int(4));
    }

    #[test]
    fn construction_errors() {
        assert!(PolyhedralConvexFunction::new(1, vec![], None).is_err());
        let empty = HPolyhedron::new(1, vec![ivec(&[1]), ivec(&[-1])], ivec(&[0, -1])).unwrap();
        assert!(PolyhedralConvexFunction::new(
            1,
            vec![AffineForm::new(ivec(&[1]), Scalar::zero())],
            Some(empty)
        )
        .is_err());
        let f = abs1();
        assert!(ReverseProblem::new(1, f.clone(), f.clone(), vec![], ivec(&[1]), Scalar::from_int(-1)).is_err());
        assert!(ReverseProblem::new(2, f.clone(), f, vec![], ivec(&[1, 1]), Scalar::zero()).is_err());
    }

    fn small() -> impl Strategy<Value = Scalar> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Scalar::frac(n, d))
    }

    fn function_2d() -> impl Strategy<Value = PolyhedralConvexFunction> {
        prop::collection::vec((-3i64..=3, -3i64..=3, -3i64..=3), 1..=4).prop_map(|ps| {
            let forms = ps
                .into_iter()
                .map(|(a, b, c)| AffineForm::new(ivec(&[a, b]), Scalar::from_int(c)))
                .collect();
            PolyhedralConvexFunction::new(2, forms, None).unwrap()
        })
    }

    proptest! {
        #[test]
        fn eval_convex_along_segments(f in function_2d(), x in (small(), small()), y in (small(), small())) {
            let x = vec![x.0, x.1];
            let y = vec![y.0, y.1];
            for t in [Scalar::frac(1, 4), Scalar::frac(1, 2), Scalar::frac(3, 4)] {
                let s = Scalar::one() - &t;
                let mid: Vec<Scalar> = x.iter().zip(&y).map(|(a, b)| &t * a + &s * b).collect();
                let lhs = f.value(&mid).unwrap();
                let rhs = &t * f.value(&x).unwrap() + &s * f.value(&y).unwrap();
                prop_assert!(lhs <= rhs);
            }
        }

        #[test]
        fn eval_positively_homogeneous_in_pieces(f in function_2d(), x in (small(), small()), lam in (1i64..=7, 1i64..=5)) {
            let x = vec![x.0, x.1];
            let lam = Scalar::frac(lam.0, lam.1);
            prop_assert_eq!(f.scaled(&lam).value(&x).unwrap(), &lam * f.value(&x).unwrap());
        }
    }
}
