//! Solver for smooth vector optimization over convex sets, where objectives
//! are compared through a finitely generated ordering cone instead of
//! coordinatewise.
//!
//! The pieces compose in one direction: an ordering cone
//! ([`cone::ConeOrder`]) and a feasible set ([`set::FeasibleSet`]) together
//! with a differentiable map ([`function::VectorFunction`]) form a problem;
//! [`oracle::solve_direction`] produces certified descent directions for it;
//! [`linesearch::armijo`] picks step lengths in the cone order; and
//! [`solver::solve`] runs the outer loop and records enough per-iteration
//! data for the convergence audits in [`solver::fejer_check`] and the
//! independent checks in [`validate`].
//!
//! Problems can be described in JSON ([`problem::ProblemFile`]), picked from
//! the built-in registry ([`registry`]), and traced to CSV ([`trace`]).

pub mod cone;
pub mod expr;
pub mod function;
mod fw;
pub mod linalg;
pub mod linesearch;
pub mod oracle;
pub mod problem;
pub mod registry;
pub mod set;
pub mod solver;
pub mod trace;
pub mod validate;

pub use cone::ConeOrder;
pub use function::VectorFunction;
pub use oracle::{DirectionCertificate, DirectionOutcome, OracleParams};
pub use problem::ProblemFile;
pub use set::FeasibleSet;
pub use solver::{
    fejer_check, solve, stationarity_residual, FejerReport, IterationRecord, SolveResult,
    SolveStatus, SolverConfig,
};
