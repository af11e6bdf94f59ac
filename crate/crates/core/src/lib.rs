//! Oracle-based fractional packing laboratory.
//!
//! The crate is organised around five pieces:
//!
//! * [`game_value`]: exact (rational) and certified approximate values of
//!   nonnegative zero-sum matrix games.
//! * [`instance_gen`]: seeded random `{0,1}` packing instances over the simplex
//!   and block-diagonal products of them, together with width computations.
//! * [`dw_solver`]: linear minimization oracles and a width-based
//!   multiplicative-weights decision procedure that touches the polytope only
//!   through oracle queries.
//! * [`theorem_lab`]: submatrix value-gap enumeration, naive Chernoff bound
//!   estimators and iteration-scaling experiments.
//! * [`harness`]: declarative experiment configs, CSV/JSON outputs and run
//!   manifests used by the `dwlab` command-line tool.

pub mod dw_solver;
pub mod error;
pub mod game_value;
pub mod harness;
pub mod instance_gen;
pub mod rational;
pub mod rng;
pub mod theorem_lab;

pub use error::{Error, Result};
pub use rational::Rational;
