//! Offline baselines: LP and IP optima of small covering programs.

mod enumerate;
mod simplex;

pub use enumerate::{ip_opt, ip_opt_exhaustive, knapsack_opt, SEARCH_LIMIT};
pub use simplex::lp_opt;

use crate::model::{ConstraintRow, Instance};
use serde::Serialize;

/// Absolute slack accepted on `lhs >= rhs` by the oracles.
pub const ORACLE_FEAS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    Unbounded,
    SearchTooLarge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub argument: Vec<f64>,
    pub status: OracleStatus,
}

impl OracleResult {
    fn without_solution(status: OracleStatus, n: usize) -> Self {
        let value = match status {
            OracleStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        };
        OracleResult { value, argument: vec![0.0; n], status }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == OracleStatus::Optimal
    }
}

/// `min c.x  s.t.  rows, 0 <= x <= u`. Unlike [`Instance`], zero costs are
/// allowed, which the knapsack and gap fixtures need.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringProgram {
    pub costs: Vec<f64>,
    pub upper: Option<Vec<u64>>,
    pub rows: Vec<ConstraintRow>,
}

impl CoveringProgram {
    pub fn new(costs: Vec<f64>, upper: Option<Vec<u64>>, rows: Vec<ConstraintRow>) -> Self {
        CoveringProgram { costs, upper, rows }
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        self.costs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        let in_box = match &self.upper {
            Some(u) => x.iter().zip(u).all(|(&v, &b)| v >= -tol && v <= b as f64 + tol),
            None => x.iter().all(|&v| v >= -tol),
        };
        in_box && self.rows.iter().all(|r| r.lhs(x) >= r.rhs - tol)
    }
}

impl From<&Instance> for CoveringProgram {
    fn from(inst: &Instance) -> Self {
        CoveringProgram {
            costs: inst.costs().to_vec(),
            upper: inst.upper_bounds().map(|u| u.to_vec()),
            rows: inst.rows().to_vec(),
        }
    }
}

/// `max_i (sum_h alpha_ih y_h) / c_i` over the given dual terms.
pub fn dual_feasibility_factor<'a>(
    terms: impl IntoIterator<Item = (&'a [(usize, f64)], f64)>,
    costs: &[f64],
) -> f64 {
    let mut load = vec![0.0; costs.len()];
    for (support, y) in terms {
        for &(i, a) in support {
            load[i] += a * y;
        }
    }
    load.iter().zip(costs).map(|(l, c)| l / c).fold(0.0, f64::max)
}
