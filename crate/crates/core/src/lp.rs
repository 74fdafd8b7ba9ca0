//! Exact rational linear programming.
//!
//! A dense two-phase tableau simplex with Bland's rule. Every outcome carries
//! a certificate that can be re-validated independently of the solver:
//!
//! * `Optimal`: primal point and a dual multiplier per row,
//! * `Unbounded`: a feasible point and an improving recession direction,
//! * `Infeasible`: a Farkas combination of rows summing to `0 ≤ -1`.
//!
//! Certificates are indexed against [`LinearProgram::rows`], i.e. the user
//! constraints followed by one row per finite variable bound (lower bound
//! first, then upper bound, in variable order). Multipliers apply to rows
//! written in `≤` form (a `≥` row is negated first); multipliers of
//! inequality rows are nonnegative, those of equality rows are free.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::scalar::{dot, Extended, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<Scalar>,
    pub relation: Relation,
    pub rhs: Scalar,
}

impl Constraint {
    /// The row in `≤` (or `=`) form: `(a, b, is_equality)`.
    fn normalized(&self) -> (Vec<Scalar>, Scalar, bool) {
        match self.relation {
            Relation::Le => (self.coeffs.clone(), self.rhs.clone(), false),
            Relation::Eq => (self.coeffs.clone(), self.rhs.clone(), true),
            Relation::Ge => (
                self.coeffs.iter().map(|c| -c).collect(),
                -&self.rhs,
                false,
            ),
        }
    }

    pub fn is_satisfied(&self, x: &[Scalar]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub lower: Option<Scalar>,
    pub upper: Option<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<Scalar>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    /// A feasibility problem over `num_vars` free variables (zero objective).
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            sense: Sense::Minimize,
            objective: vec![Scalar::zero(); num_vars],
            constraints: Vec::new(),
            bounds: vec![Bound::default(); num_vars],
        }
    }

    pub fn minimize(mut self, c: Vec<Scalar>) -> Self {
        self.sense = Sense::Minimize;
        self.objective = c;
        self
    }

    pub fn maximize(mut self, c: Vec<Scalar>) -> Self {
        self.sense = Sense::Maximize;
        self.objective = c;
        self
    }

    pub fn set_objective(&mut self, sense: Sense, c: Vec<Scalar>) {
        self.sense = sense;
        self.objective = c;
    }

    pub fn add(&mut self, coeffs: Vec<Scalar>, relation: Relation, rhs: Scalar) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Adds `Σ coef·x_var (rel) rhs` from a sparse term list.
    pub fn add_sparse(&mut self, terms: &[(usize, Scalar)], relation: Relation, rhs: Scalar) {
        let mut coeffs = vec![Scalar::zero(); self.num_vars];
        for (j, c) in terms {
            coeffs[*j] += c;
        }
        self.add(coeffs, relation, rhs);
    }

    pub fn with(mut self, coeffs: Vec<Scalar>, relation: Relation, rhs: Scalar) -> Self {
        self.add(coeffs, relation, rhs);
        self
    }

    pub fn set_lower(&mut self, var: usize, value: Scalar) {
        self.bounds[var].lower = Some(value);
    }

    pub fn set_upper(&mut self, var: usize, value: Scalar) {
        self.bounds[var].upper = Some(value);
    }

    pub fn nonneg(&mut self, var: usize) {
        self.set_lower(var, Scalar::zero());
    }

    fn validate(&self) -> Result<()> {
        check_dim(self.num_vars, self.objective.len())?;
        check_dim(self.num_vars, self.bounds.len())?;
        for c in &self.constraints {
            check_dim(self.num_vars, c.coeffs.len())?;
        }
        Ok(())
    }

    /// User constraints followed by the finite variable bounds as rows.
    pub fn rows(&self) -> Vec<Constraint> {
        let mut rows = self.constraints.clone();
        for (j, b) in self.bounds.iter().enumerate() {
            let unit = |v: Scalar| {
                let mut e = vec![Scalar::zero(); self.num_vars];
                e[j] = v;
                e
            };
            if let Some(l) = &b.lower {
                rows.push(Constraint {
                    coeffs: unit(Scalar::one()),
                    relation: Relation::Ge,
                    rhs: l.clone(),
                });
            }
            if let Some(u) = &b.upper {
                rows.push(Constraint {
                    coeffs: unit(Scalar::one()),
                    relation: Relation::Le,
                    rhs: u.clone(),
                });
            }
        }
        rows
    }

    pub fn is_feasible_point(&self, x: &[Scalar]) -> bool {
        x.len() == self.num_vars && self.rows().iter().all(|r| r.is_satisfied(x))
    }

    /// Checks a Farkas certificate: nonnegative on inequality rows, the
    /// combination of `≤`-form rows has zero left side and right side `-1`.
    pub fn verify_farkas(&self, farkas: &[Scalar]) -> bool {
        let rows = self.rows();
        if farkas.len() != rows.len() {
            return false;
        }
        let mut lhs = vec![Scalar::zero(); self.num_vars];
        let mut rhs = Scalar::zero();
        for (row, w) in rows.iter().zip(farkas) {
            let (a, b, eq) = row.normalized();
            if !eq && w.is_negative() {
                return false;
            }
            if w.is_zero() {
                continue;
            }
            for (acc, ai) in lhs.iter_mut().zip(&a) {
                *acc += ai * w;
            }
            rhs += &b * w;
        }
        lhs.iter().all(Scalar::is_zero) && rhs == -Scalar::one()
    }

    /// Checks an optimality certificate: `x` feasible with objective `value`,
    /// and `dual` certifies the bound for the sense-adjusted objective.
    pub fn verify_optimal(&self, x: &[Scalar], value: &Scalar, dual: &[Scalar]) -> bool {
        if !self.is_feasible_point(x) || &dot(&self.objective, x) != value {
            return false;
        }
        let rows = self.rows();
        if dual.len() != rows.len() {
            return false;
        }
        // Maximize form objective.
        let c: Vec<Scalar> = match self.sense {
            Sense::Maximize => self.objective.clone(),
            Sense::Minimize => self.objective.iter().map(|v| -v).collect(),
        };
        let mut comb = vec![Scalar::zero(); self.num_vars];
        let mut bound = Scalar::zero();
        for (row, w) in rows.iter().zip(dual) {
            let (a, b, eq) = row.normalized();
            if !eq && w.is_negative() {
                return false;
            }
            if w.is_zero() {
                continue;
            }
            for (acc, ai) in comb.iter_mut().zip(&a) {
                *acc += ai * w;
            }
            bound += &b * w;
        }
        let max_value = match self.sense {
            Sense::Maximize => value.clone(),
            Sense::Minimize => -value,
        };
        comb == c && bound == max_value
    }

    pub fn verify_unbounded(&self, point: &[Scalar], ray: &[Scalar]) -> bool {
        if !self.is_feasible_point(point) || ray.len() != self.num_vars {
            return false;
        }
        let homogeneous_ok = self.rows().iter().all(|r| {
            let v = dot(&r.coeffs, ray);
            match r.relation {
                Relation::Le => !v.is_positive(),
                Relation::Eq => v.is_zero(),
                Relation::Ge => !v.is_negative(),
            }
        });
        let gain = dot(&self.objective, ray);
        let improves = match self.sense {
            Sense::Maximize => gain.is_positive(),
            Sense::Minimize => gain.is_negative(),
        };
        homogeneous_ok && improves
    }

    /// Re-validates whatever certificate the outcome carries.
    pub fn verify_outcome(&self, outcome: &LpOutcome) -> bool {
        match outcome {
            LpOutcome::Optimal { x, value, dual } => self.verify_optimal(x, value, dual),
            LpOutcome::Unbounded { point, ray } => self.verify_unbounded(point, ray),
            LpOutcome::Infeasible { farkas } => self.verify_farkas(farkas),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum LpOutcome {
    Optimal {
        x: Vec<Scalar>,
        value: Scalar,
        dual: Vec<Scalar>,
    },
    Unbounded {
        point: Vec<Scalar>,
        ray: Vec<Scalar>,
    },
    Infeasible {
        farkas: Vec<Scalar>,
    },
}

impl LpOutcome {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }

    /// Optimal value, with ±∞ for unbounded (by sense) and the identity
    /// element of the sense for infeasible problems.
    pub fn extended_value(&self, sense: Sense) -> Extended {
        match (self, sense) {
            (LpOutcome::Optimal { value, .. }, _) => Extended::Finite(value.clone()),
            (LpOutcome::Unbounded { .. }, Sense::Maximize) => Extended::PosInfinity,
            (LpOutcome::Unbounded { .. }, Sense::Minimize) => Extended::NegInfinity,
            (LpOutcome::Infeasible { .. }, Sense::Maximize) => Extended::NegInfinity,
            (LpOutcome::Infeasible { .. }, Sense::Minimize) => Extended::PosInfinity,
        }
    }
}

/// Solves the program exactly.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    Ok(Tableau::build(lp).solve(lp))
}

/// Supremum of variable `index` over the feasible set of `lp` (its own
/// objective is ignored). Returns the value together with the outcome of the
/// underlying maximization.
pub fn lp_max_component(lp: &LinearProgram, index: usize) -> Result<(Extended, LpOutcome)> {
    if index >= lp.num_vars {
        return Err(Error::InvalidInput(format!(
            "variable index {index} out of range for {} variables",
            lp.num_vars
        )));
    }
    let mut e = vec![Scalar::zero(); lp.num_vars];
    e[index] = Scalar::one();
    let mut prog = lp.clone();
    prog.set_objective(Sense::Maximize, e);
    let outcome = lp_solve(&prog)?;
    Ok((outcome.extended_value(Sense::Maximize), outcome))
}

struct Tableau {
    /// `m` rows of length `cols + 1`; the last entry is the right-hand side.
    t: Vec<Vec<Scalar>>,
    basis: Vec<usize>,
    /// Sign applied to each normalized row to make its rhs nonnegative.
    row_sign: Vec<bool>,
    num_vars: usize,
    /// First artificial column. Artificial `r` is column `art + r`.
    art: usize,
    cols: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let rows: Vec<(Vec<Scalar>, Scalar, bool)> =
            lp.rows().iter().map(Constraint::normalized).collect();
        let m = rows.len();
        let n = lp.num_vars;
        let mut slack_col = Vec::with_capacity(m);
        let mut next = 2 * n;
        for (_, _, eq) in &rows {
            if *eq {
                slack_col.push(None);
            } else {
                slack_col.push(Some(next));
                next += 1;
            }
        }
        let art = next;
        let cols = art + m;
        let mut t = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for (r, (a, b, _)) in rows.iter().enumerate() {
            let flip = b.is_negative();
            let s = |v: &Scalar| if flip { -v } else { v.clone() };
            let mut row = vec![Scalar::zero(); cols + 1];
            for j in 0..n {
                if !a[j].is_zero() {
                    row[2 * j] = s(&a[j]);
                    row[2 * j + 1] = -s(&a[j]);
                }
            }
            if let Some(c) = slack_col[r] {
                row[c] = s(&Scalar::one());
            }
            row[art + r] = Scalar::one();
            row[cols] = s(b);
            t.push(row);
            row_sign.push(flip);
        }
        Tableau {
            t,
            basis: (art..art + m).collect(),
            row_sign,
            num_vars: n,
            art,
            cols,
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        if p != Scalar::one() {
            let inv = p.recip();
            for v in self.t[row].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.t[row]);
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        self.t[row] = pivot_row;
        self.basis[row] = col;
    }

    /// Reduced cost of column `j` for the maximization objective `c`.
    fn reduced_cost(&self, c: &[Scalar], j: usize) -> Scalar {
        let mut d = c[j].clone();
        for (k, &b) in self.basis.iter().enumerate() {
            if !c[b].is_zero() && !self.t[k][j].is_zero() {
                d -= &c[b] * &self.t[k][j];
            }
        }
        d
    }

    /// Runs Bland's-rule simplex maximizing `c` over columns `< limit`.
    /// Returns `Err(col)` when column `col` proves unboundedness.
    fn run(&mut self, c: &[Scalar], limit: usize) -> std::result::Result<(), usize> {
        let rhs = self.cols;
        loop {
            let entering = (0..limit)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(c, j).is_positive());
            let Some(j) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, Scalar)> = None;
            for k in 0..self.t.len() {
                let a = &self.t[k][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[k][rhs] / a;
                let better = match &best {
                    None => true,
                    Some((bk, br)) => {
                        ratio < *br || (ratio == *br && self.basis[k] < self.basis[*bk])
                    }
                };
                if better {
                    best = Some((k, ratio));
                }
            }
            match best {
                Some((k, _)) => self.pivot(k, j),
                None => return Err(j),
            }
        }
    }

    /// `y_r = Σ_k c_{B_k} (B⁻¹)_{k r}` mapped to multipliers of the
    /// `≤`-normalized rows.
    fn row_multipliers(&self, c: &[Scalar]) -> Vec<Scalar> {
        let m = self.t.len();
        (0..m)
            .map(|r| {
                let mut y = Scalar::zero();
                for (k, &b) in self.basis.iter().enumerate() {
                    let entry = &self.t[k][self.art + r];
                    if !c[b].is_zero() && !entry.is_zero() {
                        y += &c[b] * entry;
                    }
                }
                if self.row_sign[r] {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }

    fn column_values(&self) -> Vec<Scalar> {
        let mut z = vec![Scalar::zero(); self.cols];
        for (k, &b) in self.basis.iter().enumerate() {
            z[b] = self.t[k][self.cols].clone();
        }
        z
    }

    fn primal_point(&self) -> Vec<Scalar> {
        let z = self.column_values();
        (0..self.num_vars).map(|j| &z[2 * j] - &z[2 * j + 1]).collect()
    }

    fn solve(mut self, lp: &LinearProgram) -> LpOutcome {
        let m = self.t.len();
        // Phase 1: maximize -Σ artificials.
        let mut c1 = vec![Scalar::zero(); self.cols];
        for v in &mut c1[self.art..] {
            *v = -Scalar::one();
        }
        self.run(&c1, self.cols)
            .expect("phase one objective is bounded");
        let phase1: Scalar = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= self.art)
            .map(|(k, _)| self.t[k][self.cols].clone())
            .sum();
        if phase1.is_positive() {
            let mut w = self.row_multipliers(&c1);
            let rows = lp.rows();
            let total: Scalar = rows
                .iter()
                .zip(&w)
                .map(|(row, wi)| &row.normalized().1 * wi)
                .sum();
            debug_assert!(total.is_negative());
            let scale = (-total).recip();
            for wi in &mut w {
                *wi *= &scale;
            }
            return LpOutcome::Infeasible { farkas: w };
        }
        // Drive remaining artificials out of the basis where possible.
        for k in 0..m {
            if self.basis[k] >= self.art {
                if let Some(j) = (0..self.art).find(|&j| !self.t[k][j].is_zero()) {
                    self.pivot(k, j);
                }
            }
        }
        // Phase 2 in maximize form over the split variables.
        let mut c2 = vec![Scalar::zero(); self.cols];
        for j in 0..self.num_vars {
            let cj = match lp.sense {
                Sense::Maximize => lp.objective[j].clone(),
                Sense::Minimize => -&lp.objective[j],
            };
            c2[2 * j + 1] = -&cj;
            c2[2 * j] = cj;
        }
        match self.run(&c2, self.art) {
            Ok(()) => {
                let x = self.primal_point();
                let value = dot(&lp.objective, &x);
                let dual = self.row_multipliers(&c2);
                LpOutcome::Optimal { x, value, dual }
            }
            Err(j) => {
                let point = self.primal_point();
                let mut dz = vec![Scalar::zero(); self.cols];
                dz[j] = Scalar::one();
                for (k, &b) in self.basis.iter().enumerate() {
                    dz[b] = -&self.t[k][j];
                }
                let ray = (0..self.num_vars)
                    .map(|v| &dz[2 * v] - &dz[2 * v + 1])
                    .collect();
                LpOutcome::Unbounded { point, ray }
            }
        }
    }
}
