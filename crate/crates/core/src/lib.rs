//! Online primal-dual algorithms for covering linear and integer programs.
//!
//! Rows of `min c.x  s.t.  A x >= 1` arrive one at a time and the solution
//! may only increase. The crate provides
//!
//! - [`clp`]: an `O(log k)`-competitive fractional solver, `k` the row sparsity;
//! - [`box_kc`]: the same scheme with upper bounds `x <= u`, generating
//!   knapsack-cover residual constraints as variables freeze;
//! - [`rounding`]: threshold rounding of the box solution with greedy
//!   alterations, giving an integral solution online;
//! - [`oracles`]: offline LP/IP optima for measuring ratios;
//! - [`adversary`]: the lower-bound adversary for guess-and-double schemes;
//! - [`harness`]: random instances, end-to-end runs, reports, ratio sweeps.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod adversary;
pub mod box_kc;
pub mod checks;
pub mod clp;
mod dual;
pub mod harness;
pub mod model;
pub mod oracles;
pub mod rounding;

pub use dual::{DualUpdate, PrefixDecrease};
pub use model::{load_instance, save_instance, ConstraintRow, Instance, ModelError};
