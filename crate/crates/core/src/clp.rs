//! Online fractional covering without upper bounds.
//!
//! On arrival of `sum_i a_ih x_i >= 1` the primal is raised multiplicatively
//! until the row is covered, then the new dual is raised to `d_m * t_h` while
//! older duals sharing a saturated dual constraint are decreased. The solver
//! evaluates its approximation invariants after every arrival; see
//! [`ArrivalChecks`].

use crate::checks::{ge_rel, le_rel, Check, LemmaReport, FEAS_TOL};
use crate::dual::{DualLedger, DualUpdate, PrefixDecrease};
use crate::model::{normalize_row, ConstraintRow, ModelError, SparsityTracker};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClpError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("row references x{var} but the solver has {n} variables")]
    UnknownVariable { var: usize, n: usize },
}

/// Minimum ratio `d_m = min_i c_i / a_i` over the row, ties to the lowest index.
pub fn min_ratio(row: &ConstraintRow, costs: &[f64]) -> f64 {
    row.entries
        .iter()
        .map(|&(i, a)| costs[i] / a)
        .fold(f64::INFINITY, f64::min)
}

/// One multiplicative update on the coordinates of `row`:
/// `x_i <- (1 + d_m/d_i) x_i + (d_m/d_i) / (k a_i)` with `d_i = c_i / a_i`.
pub fn primal_step(x: &mut [f64], row: &ConstraintRow, costs: &[f64], d_m: f64, k: u64) {
    let k = k as f64;
    for &(i, a) in &row.entries {
        let ratio = d_m * a / costs[i];
        x[i] = (1.0 + ratio) * x[i] + ratio / (k * a);
    }
}

/// A dual variable together with the data it was created from.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRecord<'a> {
    pub y: f64,
    pub d_m: f64,
    pub t: u32,
    pub k_at_arrival: u64,
    pub support: &'a [(usize, f64)],
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct DualMeta {
    d_m: f64,
    t: u32,
    k_at_arrival: u64,
}

/// Invariant outcomes for a single arrival.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalChecks {
    /// `t_h <= 2 log2 k`, exact integer comparison.
    pub step_bound: bool,
    /// Primal cost increase `<= 2 t_h d_m`.
    pub primal_increase: bool,
    /// `a_ih d_m t_h <= 2 log2 k c_i` for every `i` in the row.
    pub new_dual_load: bool,
    /// Each decreased prefix carried mass in `[3, 5] c_i log2 k`.
    pub prefix_window: bool,
    /// Every touched dual constraint is within `12 log2 k c_i` afterwards.
    pub dual_feasible: bool,
    /// Dual objective increase `>= t_h d_m / 2`.
    pub dual_increase: bool,
    pub monotone: bool,
    pub feasible: bool,
}

impl ArrivalChecks {
    pub fn all(&self) -> bool {
        self.step_bound
            && self.primal_increase
            && self.new_dual_load
            && self.prefix_window
            && self.dual_feasible
            && self.dual_increase
            && self.monotone
            && self.feasible
    }

    pub fn as_checks(&self) -> [Check; 8] {
        [
            Check::new("clp.step_bound", self.step_bound),
            Check::new("clp.primal_increase", self.primal_increase),
            Check::new("clp.new_dual_load", self.new_dual_load),
            Check::new("clp.prefix_window", self.prefix_window),
            Check::new("clp.dual_feasible", self.dual_feasible),
            Check::new("clp.dual_increase", self.dual_increase),
            Check::new("clp.monotone", self.monotone),
            Check::new("clp.feasible", self.feasible),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalEvent {
    pub arrival: usize,
    pub k_est: u64,
    pub t: u32,
    pub d_m: f64,
    pub primal_delta: f64,
    pub dual_delta: f64,
    pub decreases: Vec<PrefixDecrease>,
    pub checks: ArrivalChecks,
}

/// State of the online fractional covering algorithm.
#[derive(Debug, Clone)]
pub struct ClpState {
    costs: Vec<f64>,
    x: Vec<f64>,
    ledger: DualLedger,
    meta: Vec<DualMeta>,
    windows: Vec<f64>,
    tracker: SparsityTracker,
    primal_cost: f64,
}

impl ClpState {
    pub fn new(costs: Vec<f64>) -> Self {
        let n = costs.len();
        ClpState {
            costs,
            x: vec![0.0; n],
            ledger: DualLedger::default(),
            meta: Vec::new(),
            windows: Vec::new(),
            tracker: SparsityTracker::new(),
            primal_cost: 0.0,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn tracker(&self) -> &SparsityTracker {
        &self.tracker
    }

    pub fn primal_cost(&self) -> f64 {
        self.primal_cost
    }

    pub fn dual_total(&self) -> f64 {
        self.ledger.total()
    }

    pub fn num_arrivals(&self) -> usize {
        self.meta.len()
    }

    pub fn dual(&self, h: usize) -> DualRecord<'_> {
        let m = self.meta[h];
        DualRecord {
            y: self.ledger.y(h),
            d_m: m.d_m,
            t: m.t,
            k_at_arrival: m.k_at_arrival,
            support: self.ledger.support(h),
        }
    }

    pub fn duals(&self) -> impl Iterator<Item = DualRecord<'_>> + '_ {
        (0..self.meta.len()).map(move |h| self.dual(h))
    }

    /// `(support, y)` pairs of the dual solution.
    pub fn dual_terms(&self) -> impl Iterator<Item = (&[(usize, f64)], f64)> + '_ {
        self.ledger.terms()
    }

    /// Left-hand side of dual constraint `var`.
    pub fn dual_lhs(&self, var: usize) -> f64 {
        self.ledger.lhs(var)
    }

    /// Processes one arriving row (normalized here if needed).
    pub fn arrive(&mut self, row: &ConstraintRow) -> Result<ArrivalEvent, ClpError> {
        let row = normalize_row(row)?;
        if let Some(var) = row.indices().find(|&i| i >= self.costs.len()) {
            return Err(ClpError::UnknownVariable { var, n: self.costs.len() });
        }
        self.tracker.observe_row(&row);
        let k = self.tracker.k_est();
        let log_k = self.tracker.log2_k();
        let before: Vec<f64> = row.indices().map(|i| self.x[i]).collect();

        let d_m = min_ratio(&row, &self.costs);
        let mut t = 0u32;
        while row.lhs(&self.x) < 1.0 - FEAS_TOL {
            primal_step(&mut self.x, &row, &self.costs, d_m, k);
            t += 1;
        }

        let mut primal_delta = 0.0;
        let mut monotone = true;
        for (&(i, _), &old) in row.entries.iter().zip(&before) {
            monotone &= self.x[i] >= old;
            primal_delta += self.costs[i] * (self.x[i] - old);
        }
        self.primal_cost += primal_delta;
        let feasible = row.lhs(&self.x) >= 1.0 - FEAS_TOL;

        let update = self.dual_update(&row, d_m, t, k);
        let log_k_f = log_k as f64;

        let new_dual_load = row
            .entries
            .iter()
            .all(|&(i, a)| le_rel(a * d_m * t as f64, 2.0 * log_k_f * self.costs[i]));
        let prefix_window = update
            .decreases
            .iter()
            .all(|d| ge_rel(d.window, 3.0) && le_rel(d.window, 5.0));
        let dual_feasible = row
            .indices()
            .all(|i| le_rel(self.ledger.lhs(i), 12.0 * log_k_f * self.costs[i]));
        let checks = ArrivalChecks {
            step_bound: t <= 2 * log_k,
            primal_increase: le_rel(primal_delta, 2.0 * t as f64 * d_m),
            new_dual_load,
            prefix_window,
            dual_feasible,
            dual_increase: ge_rel(update.net(), 0.5 * d_m * t as f64),
            monotone,
            feasible,
        };
        Ok(ArrivalEvent {
            arrival: self.meta.len() - 1,
            k_est: k,
            t,
            d_m,
            primal_delta,
            dual_delta: update.net(),
            decreases: update.decreases,
            checks,
        })
    }

    fn dual_update(&mut self, row: &ConstraintRow, d_m: f64, t: u32, k: u64) -> DualUpdate {
        let log_k = k.trailing_zeros() as f64;
        let (_, update) =
            self.ledger.credit(row.entries.clone(), d_m, t as f64, &self.costs, log_k);
        self.meta.push(DualMeta { d_m, t, k_at_arrival: k });
        self.windows.extend(update.decreases.iter().map(|d| d.window));
        update
    }

    /// Re-evaluates the global invariants on the current state.
    pub fn check_lemmas(&self) -> LemmaReport {
        let mut report = LemmaReport::default();
        let bad_steps = self
            .meta
            .iter()
            .filter(|m| m.t > 2 * m.k_at_arrival.trailing_zeros())
            .count();
        report.push(Check::with_detail(
            "clp.step_bound",
            bad_steps == 0,
            format!("{bad_steps} arrivals exceed 2 log2 k"),
        ));

        let log_k = self.tracker.log2_k() as f64;
        let mut worst = 0.0f64;
        let mut feasible = true;
        for (i, &c) in self.costs.iter().enumerate() {
            let lhs = self.ledger.lhs(i);
            worst = worst.max(lhs / c);
            feasible &= le_rel(lhs, 12.0 * log_k * c);
        }
        report.push(Check::with_detail(
            "clp.dual_feasible",
            feasible,
            format!("max load {worst:.6} vs 12 log2 k = {}", 12.0 * log_k),
        ));

        let primal = self.recomputed_primal_cost();
        let dual = self.ledger.recomputed_total();
        report.push(Check::with_detail(
            "clp.primal_vs_dual",
            le_rel(primal, 4.0 * dual),
            format!("c.x = {primal:.6}, 4 * dual = {:.6}", 4.0 * dual),
        ));

        let bad_windows = self
            .windows
            .iter()
            .filter(|&&w| !(ge_rel(w, 3.0) && le_rel(w, 5.0)))
            .count();
        report.push(Check::with_detail(
            "clp.prefix_window",
            bad_windows == 0,
            format!("{} prefix decreases, {bad_windows} outside [3, 5]", self.windows.len()),
        ));

        let running_ok = (self.primal_cost - primal).abs() <= 1e-9 * primal.abs().max(1.0)
            && (self.ledger.total() - dual).abs() <= 1e-9 * dual.abs().max(1.0);
        report.push(Check::new("clp.running_totals", running_ok));
        report
    }

    pub fn recomputed_primal_cost(&self) -> f64 {
        self.costs.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    #[cfg(test)]
    fn scale_dual(&mut self, h: usize, factor: f64) {
        self.ledger.ys_mut()[h] *= factor;
    }
}
