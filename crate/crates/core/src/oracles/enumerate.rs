//! Integral optima by bounded enumeration.

use super::{CoveringProgram, OracleResult, OracleStatus, ORACLE_FEAS_TOL};
use crate::model::ConstraintRow;

/// Largest lattice (`prod (u_i + 1)`) the enumerators accept.
pub const SEARCH_LIMIT: f64 = 2e5;

/// Box used for the search: `u` if present, otherwise the smallest value of
/// each variable that covers every row containing it on its own.
fn search_box(p: &CoveringProgram) -> Vec<u64> {
    if let Some(u) = &p.upper {
        return u.clone();
    }
    let mut b = vec![0u64; p.n()];
    for row in &p.rows {
        for &(i, a) in &row.entries {
            let need = (row.rhs / a - ORACLE_FEAS_TOL).ceil().max(0.0) as u64;
            b[i] = b[i].max(need);
        }
    }
    b
}

fn lattice_size(b: &[u64]) -> f64 {
    b.iter().map(|&v| v as f64 + 1.0).product()
}

fn covered(rows: &[ConstraintRow], lhs: &[f64]) -> bool {
    rows.iter().zip(lhs).all(|(r, l)| *l >= r.rhs - ORACLE_FEAS_TOL)
}

/// Exact integral optimum by depth-first search with a running-best prune.
/// Variables are branched in non-decreasing order of cost per unit of total
/// coverage.
pub fn ip_opt(p: &CoveringProgram) -> OracleResult {
    let n = p.n();
    let bounds = search_box(p);
    if lattice_size(&bounds) > SEARCH_LIMIT {
        return OracleResult::without_solution(OracleStatus::SearchTooLarge, n);
    }

    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (j, row) in p.rows.iter().enumerate() {
        for &(i, a) in &row.entries {
            cols[i].push((j, a));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let density = |i: usize| {
        let cover: f64 = cols[i].iter().map(|&(_, a)| a).sum();
        if cover > 0.0 { p.costs[i] / cover } else { f64::INFINITY }
    };
    order.sort_by(|&a, &b| density(a).partial_cmp(&density(b)).unwrap().then(a.cmp(&b)));

    // reach[pos][j]: coverage of row j still available from order[pos..]
    let m = p.rows.len();
    let mut reach = vec![vec![0.0; m]; n + 1];
    for pos in (0..n).rev() {
        let i = order[pos];
        reach[pos] = reach[pos + 1].clone();
        for &(j, a) in &cols[i] {
            reach[pos][j] += a * bounds[i] as f64;
        }
    }

    let mut search = Dfs {
        p,
        order: &order,
        cols: &cols,
        bounds: &bounds,
        reach: &reach,
        lhs: vec![0.0; m],
        x: vec![0u64; n],
        best: None,
    };
    search.visit(0, 0.0);
    match search.best {
        Some((value, x)) => OracleResult {
            value,
            argument: x.iter().map(|&v| v as f64).collect(),
            status: OracleStatus::Optimal,
        },
        None => OracleResult::without_solution(OracleStatus::Infeasible, n),
    }
}

struct Dfs<'a> {
    p: &'a CoveringProgram,
    order: &'a [usize],
    cols: &'a [Vec<(usize, f64)>],
    bounds: &'a [u64],
    reach: &'a [Vec<f64>],
    lhs: Vec<f64>,
    x: Vec<u64>,
    best: Option<(f64, Vec<u64>)>,
}

impl Dfs<'_> {
    fn visit(&mut self, pos: usize, cost: f64) {
        if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
            return;
        }
        if covered(&self.p.rows, &self.lhs) {
            // costs are non-negative, so the rest stays at zero
            self.best = Some((cost, self.x.clone()));
            return;
        }
        if pos == self.order.len() {
            return;
        }
        let reachable = self
            .p
            .rows
            .iter()
            .enumerate()
            .all(|(j, r)| self.lhs[j] + self.reach[pos][j] >= r.rhs - ORACLE_FEAS_TOL);
        if !reachable {
            return;
        }
        let i = self.order[pos];
        let c = self.p.costs[i];
        for v in 0..=self.bounds[i] {
            self.x[i] = v;
            self.visit(pos + 1, cost + v as f64 * c);
            if v < self.bounds[i] {
                for &(j, a) in &self.cols[i] {
                    self.lhs[j] += a;
                }
            }
        }
        for &(j, a) in &self.cols[i] {
            self.lhs[j] -= a * self.bounds[i] as f64;
        }
        self.x[i] = 0;
    }
}

/// Exact integral optimum by visiting every lattice point of the search box.
pub fn ip_opt_exhaustive(p: &CoveringProgram) -> OracleResult {
    let n = p.n();
    let bounds = search_box(p);
    if lattice_size(&bounds) > SEARCH_LIMIT {
        return OracleResult::without_solution(OracleStatus::SearchTooLarge, n);
    }
    let mut x = vec![0u64; n];
    let mut best: Option<(f64, Vec<u64>)> = None;
    loop {
        let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let lhs: Vec<f64> = p.rows.iter().map(|r| r.lhs(&xf)).collect();
        if covered(&p.rows, &lhs) {
            let cost = p.cost(&xf);
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, x.clone()));
            }
        }
        let mut d = 0;
        while d < n && x[d] == bounds[d] {
            x[d] = 0;
            d += 1;
        }
        if d == n {
            break;
        }
        x[d] += 1;
    }
    match best {
        Some((value, x)) => OracleResult {
            value,
            argument: x.iter().map(|&v| v as f64).collect(),
            status: OracleStatus::Optimal,
        },
        None => OracleResult::without_solution(OracleStatus::Infeasible, n),
    }
}

/// Optimum of `min c.w  s.t.  sum a_i w_i >= 1, 0 <= w <= u` over integers.
pub fn knapsack_opt(costs: &[f64], coeffs: &[f64], bounds: &[u64]) -> OracleResult {
    let entries: Vec<(usize, f64)> =
        coeffs.iter().enumerate().filter(|(_, &a)| a > 0.0).map(|(i, &a)| (i, a)).collect();
    let reach: f64 = coeffs.iter().zip(bounds).map(|(a, &u)| a * u as f64).sum();
    if entries.is_empty() || reach < 1.0 - ORACLE_FEAS_TOL {
        return OracleResult::without_solution(OracleStatus::Infeasible, costs.len());
    }
    let p = CoveringProgram::new(
        costs.to_vec(),
        Some(bounds.to_vec()),
        vec![ConstraintRow::unit(entries)],
    );
    ip_opt(&p)
}
