//! The Dantzig-Wolfe query model.
//!
//! A solver here sees the constraint data `A`, `b` and the dimension of P; it
//! learns about P itself only by asking a [`LinearOracle`] for minimizers of
//! linear costs. The oracle counts every subproblem it solves.

mod check;
mod oracle;
mod report;
mod solver;

pub use check::{check_feasible, check_infeasibility_certificate, VERTEX_ENUMERATION_GUARD};
pub use oracle::{lmo_product, lmo_simplex, LinearOracle, OracleAnswer, OracleQuery, PolytopeOracle};
pub use report::{count_distinct_vertices, Outcome, SolveReport, TrajectoryRow};
pub use solver::{solve_packing, SolverConfig};

use crate::error::Result;
use crate::instance_gen::PackingInstance;

/// Solves with a fresh oracle built from the instance's own polytope.
pub fn solve_instance(inst: &PackingInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    let oracle = PolytopeOracle::new(inst.polytope.clone())?;
    solve_packing(inst, cfg, &oracle)
}
