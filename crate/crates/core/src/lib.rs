//! Exact verification of approximate global optimality for reverse convex
//! programs with polyhedral data.
//!
//! All arithmetic is over arbitrary-precision rationals. The building blocks
//! are an exact simplex solver with Farkas and dual certificates ([`lp`]),
//! double description vertex enumeration ([`polytope`]) and ε-subdifferential
//! calculus ([`subdiff`]). On top of them, [`certificates`] decides the
//! subdifferential inclusion criteria, [`oracle`] provides brute-force grid
//! ground truth and [`pareto`] checks the bicriteria identities.

pub mod certificates;
pub mod error;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod pareto;
pub mod polytope;
pub mod scalar;
pub mod subdiff;

pub use certificates::{
    falsify, verify, CertificateVerdict, EpsPrimeSweep, InapplicableReason, Mode, VerdictStatus,
    Witness,
};
pub use error::{Error, Result};
pub use lp::{lp_max_component, lp_solve, LinearProgram, LpOutcome, Relation, Sense};
pub use model::{AffineForm, HPolyhedron, PolyhedralConvexFunction, ReverseProblem};
pub use oracle::{brute_eps_argmin, GridSpec, OracleMode};
pub use polytope::{h_member, project, vertex_enumerate, VPolytope};
pub use scalar::{Extended, Scalar};
pub use subdiff::{scale_subdiff, subdiff_member, subdiff_vrep, SubdiffQuery};
