//! The on-disk problem format. Every number is a rational string such as
//! `"3"` or `"-5/2"`; unknown fields are rejected.

use serde::{Deserialize, Serialize};

use revcert_core::{AffineForm, HPolyhedron, PolyhedralConvexFunction, ReverseProblem, Scalar};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub objective: FunctionSpec,
    pub reverse: FunctionSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<FunctionSpec>,
    pub point: Vec<Scalar>,
    pub epsilon: Scalar,
}

/// `max_i (a_i·x + b_i)`, restricted to `{x : A x ≤ b}` when a domain is given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub pieces: Vec<PieceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub a: Vec<Scalar>,
    pub b: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(rename = "A")]
    pub matrix: Vec<Vec<Scalar>>,
    pub b: Vec<Scalar>,
}

impl FunctionSpec {
    pub fn to_function(&self, n: usize) -> Result<PolyhedralConvexFunction, CliError> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffineForm::new(p.a.clone(), p.b.clone()))
            .collect();
        let domain = self
            .domain
            .as_ref()
            .map(|d| HPolyhedron::new(n, d.matrix.clone(), d.b.clone()))
            .transpose()?;
        Ok(PolyhedralConvexFunction::new(n, pieces, domain)?)
    }

    pub fn from_function(f: &PolyhedralConvexFunction) -> Self {
        FunctionSpec {
            pieces: f
                .pieces()
                .iter()
                .map(|p| PieceSpec {
                    a: p.a.clone(),
                    b: p.b.clone(),
                })
                .collect(),
            domain: f.domain().map(|d| DomainSpec {
                matrix: d.rows().to_vec(),
                b: d.rhs().to_vec(),
            }),
        }
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    pub fn to_problem(&self) -> Result<ReverseProblem, CliError> {
        let n = self.n;
        let constraints = self
            .constraints
            .iter()
            .map(|g| g.to_function(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ReverseProblem::new(
            n,
            self.objective.to_function(n)?,
            self.reverse.to_function(n)?,
            constraints,
            self.point.clone(),
            self.epsilon.clone(),
        )?)
    }

    pub fn from_problem(p: &ReverseProblem) -> Self {
        ProblemFile {
            n: p.dim(),
            objective: FunctionSpec::from_function(p.objective()),
            reverse: FunctionSpec::from_function(p.reverse()),
            constraints: p.constraints().iter().map(FunctionSpec::from_function).collect(),
            point: p.point().to_vec(),
            epsilon: p.epsilon().clone(),
        }
    }
}
