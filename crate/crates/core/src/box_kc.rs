//! Online fractional covering with box constraints `0 <= x_i <= u_i`.
//!
//! The solver keeps a working vector `x` and reports the truncated solution
//! `x̄` (`x̄_i = u_i` once `x_i` reaches `tau * u_i`, otherwise `x_i`). Each
//! arriving row spawns one or more residual knapsack-cover constraints
//! `sum_{i in T} min(1, a_i / b) x_i >= 1` over the unfrozen support `T`,
//! where `b = 1 - sum_{frozen} a_i u_i`. Those residual constraints are
//! handled by the same multiplicative update as the unbounded solver, damped by
//! a step size `delta <= 1` so no variable overshoots `tau * u_i`.

use crate::checks::{ge_rel, le_rel, Check, LemmaReport, FEAS_TOL};
use crate::dual::{DualLedger, PrefixDecrease};
use crate::model::{normalize_row, ConstraintRow, ModelError, SparsityTracker};
use serde::Serialize;
use thiserror::Error;

/// Loop guard slack for the residual constraints. Tighter than [`FEAS_TOL`]
/// so that rescaling by `b <= 1` keeps `x̄` feasible at `FEAS_TOL`.
const RESIDUAL_TOL: f64 = 1e-13;

#[derive(Debug, Error, PartialEq)]
pub enum BoxError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("row references x{var} but the solver has {n} variables")]
    UnknownVariable { var: usize, n: usize },
    #[error("threshold tau = {0} outside (0, 1/2)")]
    BadThreshold(f64),
    #[error("row {row} cannot be covered even with every variable at its upper bound")]
    Infeasible { row: usize },
}

/// Freezing threshold policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tau {
    Fixed(f64),
    /// `1 / (8 log2 max(l, 2))` for the current column-sparsity estimate `l`.
    ColumnSparsity,
}

impl Default for Tau {
    fn default() -> Self {
        Tau::Fixed(0.125)
    }
}

pub fn column_sparsity_tau(ell: u32) -> f64 {
    1.0 / (8.0 * f64::from(ell.max(2)).log2())
}

impl Tau {
    pub fn resolve(&self, tracker: &SparsityTracker) -> f64 {
        match *self {
            Tau::Fixed(t) => t,
            Tau::ColumnSparsity => column_sparsity_tau(tracker.ell_est()),
        }
    }
}

/// Per-variable step caps: the largest `delta_i` for which one damped update
/// keeps `x_i <= tau * u_i`.
pub fn delta_caps(
    x: &[f64],
    support: &[(usize, f64)],
    costs: &[f64],
    upper: &[u64],
    d_m: f64,
    tau: f64,
    k: u64,
) -> Vec<f64> {
    let k = k as f64;
    support
        .iter()
        .map(|&(i, alpha)| {
            let ratio = d_m * alpha / costs[i];
            (tau * upper[i] as f64 - x[i]) / (x[i] * ratio + ratio / (k * alpha))
        })
        .collect()
}

/// Largest `delta` in `(0, 1]` such that the damped update keeps every
/// coordinate of `support` at or below `tau * u_i`.
pub fn max_delta(
    x: &[f64],
    support: &[(usize, f64)],
    costs: &[f64],
    upper: &[u64],
    d_m: f64,
    tau: f64,
    k: u64,
) -> f64 {
    delta_caps(x, support, costs, upper, d_m, tau, k)
        .into_iter()
        .fold(1.0, f64::min)
}

/// A residual constraint `sum_{i in T} alpha_i x_i >= 1` generated online.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedConstraint {
    pub source_row: usize,
    /// `(i, alpha_i)` over the unfrozen support.
    pub support: Vec<(usize, f64)>,
    pub residual_b: f64,
    pub d_m: f64,
    pub t: f64,
    pub full_steps: u32,
    pub partial_step: Option<f64>,
    pub k_at_generation: u64,
}

impl GeneratedConstraint {
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.support.iter().map(|&(i, a)| a * x[i]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintChecks {
    /// `t_h <= 2 log2 k`.
    pub step_bound: bool,
    /// Whole steps followed by at most one trailing partial step.
    pub step_shape: bool,
    pub primal_increase: bool,
    pub new_dual_load: bool,
    pub prefix_window: bool,
    pub dual_feasible: bool,
    pub dual_increase: bool,
    /// Covering the residual constraint implies `x̄` covers the source row.
    pub residual_implies_row: bool,
}

impl ConstraintChecks {
    pub fn as_checks(&self) -> [Check; 8] {
        [
            Check::new("box.step_bound", self.step_bound),
            Check::new("box.step_shape", self.step_shape),
            Check::new("box.primal_increase", self.primal_increase),
            Check::new("box.new_dual_load", self.new_dual_load),
            Check::new("box.prefix_window", self.prefix_window),
            Check::new("box.dual_feasible", self.dual_feasible),
            Check::new("box.dual_increase", self.dual_increase),
            Check::new("box.residual_implies_row", self.residual_implies_row),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintEvent {
    pub h: usize,
    pub source_row: usize,
    pub support_len: usize,
    pub residual_b: f64,
    pub d_m: f64,
    pub t: f64,
    pub primal_delta: f64,
    pub dual_delta: f64,
    /// Variables frozen by this constraint's last step.
    pub frozen: Vec<usize>,
    pub decreases: Vec<PrefixDecrease>,
    pub checks: ConstraintChecks,
}

/// The knapsack-cover inequality for a row with respect to its frozen set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KcCheck {
    pub row: usize,
    /// `a_j(H) = sum_{i in H} a_ij u_i`.
    pub frozen_mass: f64,
    pub vacuous: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

/// Evaluates `sum_{i not in H} min(a_i, 1 - a(H)) x_i >= 1 - a(H)` for a row.
pub fn kc_check(
    row_index: usize,
    row: &ConstraintRow,
    x: &[f64],
    in_h: impl Fn(usize) -> bool,
    upper: &[u64],
) -> KcCheck {
    let frozen_mass: f64 = row
        .entries
        .iter()
        .filter(|&&(i, _)| in_h(i))
        .map(|&(i, a)| a * upper[i] as f64)
        .sum();
    if frozen_mass >= 1.0 {
        return KcCheck { row: row_index, frozen_mass, vacuous: true, lhs: 0.0, rhs: 0.0, passed: true };
    }
    let rhs = 1.0 - frozen_mass;
    let lhs: f64 = row
        .entries
        .iter()
        .filter(|&&(i, _)| !in_h(i))
        .map(|&(i, a)| a.min(rhs) * x[i])
        .sum();
    KcCheck {
        row: row_index,
        frozen_mass,
        vacuous: false,
        lhs,
        rhs,
        passed: lhs >= rhs * (1.0 - 1e-9),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxArrival {
    pub row: usize,
    pub tau: f64,
    pub k_est: u64,
    pub ell_est: u32,
    pub constraints: Vec<ConstraintEvent>,
    pub kc: KcCheck,
    /// `x̄` covers every row seen so far.
    pub xbar_feasible: bool,
    /// `x` and `x̄` did not decrease anywhere.
    pub monotone: bool,
}

impl BoxArrival {
    pub fn checks(&self) -> Vec<Check> {
        let mut out: Vec<Check> = self
            .constraints
            .iter()
            .flat_map(|c| c.checks.as_checks())
            .collect();
        out.push(Check::new("box.kc_witness", self.kc.passed));
        out.push(Check::new("box.xbar_feasible", self.xbar_feasible));
        out.push(Check::new("box.monotone", self.monotone));
        out
    }

    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct BoxState {
    costs: Vec<f64>,
    upper: Vec<u64>,
    x: Vec<f64>,
    frozen: Vec<bool>,
    constraints: Vec<GeneratedConstraint>,
    ledger: DualLedger,
    tracker: SparsityTracker,
    tau_log: Vec<f64>,
    rows: Vec<ConstraintRow>,
    kc_log: Vec<KcCheck>,
    windows: Vec<f64>,
}

impl BoxState {
    pub fn new(costs: Vec<f64>, upper: Vec<u64>) -> Self {
        assert_eq!(costs.len(), upper.len(), "one upper bound per variable");
        let n = costs.len();
        BoxState {
            costs,
            upper,
            x: vec![0.0; n],
            frozen: vec![false; n],
            constraints: Vec::new(),
            ledger: DualLedger::default(),
            tracker: SparsityTracker::new(),
            tau_log: Vec::new(),
            rows: Vec::new(),
            kc_log: Vec::new(),
            windows: Vec::new(),
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn upper(&self) -> &[u64] {
        &self.upper
    }

    pub fn tracker(&self) -> &SparsityTracker {
        &self.tracker
    }

    pub fn tau_log(&self) -> &[f64] {
        &self.tau_log
    }

    pub fn constraints(&self) -> &[GeneratedConstraint] {
        &self.constraints
    }

    pub fn dual(&self, h: usize) -> f64 {
        self.ledger.y(h)
    }

    pub fn dual_total(&self) -> f64 {
        self.ledger.total()
    }

    pub fn dual_terms(&self) -> impl Iterator<Item = (&[(usize, f64)], f64)> + '_ {
        self.ledger.terms()
    }

    pub fn primal_cost(&self) -> f64 {
        self.costs.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    /// The truncated solution `x̄`.
    pub fn bar_x(&self) -> Vec<f64> {
        self.x
            .iter()
            .zip(&self.frozen)
            .zip(&self.upper)
            .map(|((&x, &f), &u)| if f { u as f64 } else { x })
            .collect()
    }

    /// Knapsack-cover witness recorded when row `j` finished.
    pub fn kc_witness(&self, j: usize) -> Option<&KcCheck> {
        self.kc_log.get(j)
    }

    pub fn rows_seen(&self) -> &[ConstraintRow] {
        &self.rows
    }

    pub fn arrive_box(&mut self, row: &ConstraintRow, tau: Tau) -> Result<BoxArrival, BoxError> {
        let row = normalize_row(row)?;
        let n = self.costs.len();
        if let Some(var) = row.indices().find(|&i| i >= n) {
            return Err(BoxError::UnknownVariable { var, n });
        }
        self.tracker.observe_row(&row);
        let tau = tau.resolve(&self.tracker);
        if !(tau > 0.0 && tau < 0.5) {
            return Err(BoxError::BadThreshold(tau));
        }
        let j = self.rows.len();
        self.rows.push(row.clone());
        self.tau_log.push(tau);
        let k = self.tracker.k_est();
        let log_k = self.tracker.log2_k();

        let x_before = self.x.clone();
        let xbar_before = self.bar_x();

        // A shrinking threshold can leave unfrozen variables above it.
        for i in 0..n {
            if !self.frozen[i] && self.x[i] >= tau * self.upper[i] as f64 {
                self.frozen[i] = true;
            }
        }

        let mut events = Vec::new();
        loop {
            let frozen_mass: f64 = row
                .entries
                .iter()
                .filter(|&&(i, _)| self.frozen[i])
                .map(|&(i, a)| a * self.upper[i] as f64)
                .sum();
            let b = 1.0 - frozen_mass;
            if b <= 0.0 {
                break;
            }
            let support: Vec<(usize, f64)> = row
                .entries
                .iter()
                .filter(|&&(i, _)| !self.frozen[i])
                .map(|&(i, a)| (i, (a / b).min(1.0)))
                .collect();
            if support.is_empty() {
                return Err(BoxError::Infeasible { row: j });
            }
            let (event, froze) = self.process_constraint(j, &row, support, b, tau, k, log_k);
            events.push(event);
            if !froze {
                break;
            }
        }

        let xbar = self.bar_x();
        let monotone = self.x.iter().zip(&x_before).all(|(a, b)| a >= b)
            && xbar.iter().zip(&xbar_before).all(|(a, b)| a >= b);
        let xbar_feasible = self.rows.iter().all(|r| r.lhs(&xbar) >= 1.0 - FEAS_TOL);
        let frozen = &self.frozen;
        let kc = kc_check(j, &row, &self.x, |i| frozen[i], &self.upper);
        self.kc_log.push(kc.clone());

        Ok(BoxArrival {
            row: j,
            tau,
            k_est: k,
            ell_est: self.tracker.ell_est(),
            constraints: events,
            kc,
            xbar_feasible,
            monotone,
        })
    }

    /// Runs the damped update loop for one residual constraint and credits its
    /// dual. Returns whether the last step froze a variable.
    #[allow(clippy::too_many_arguments)]
    fn process_constraint(
        &mut self,
        j: usize,
        row: &ConstraintRow,
        support: Vec<(usize, f64)>,
        b: f64,
        tau: f64,
        k: u64,
        log_k: u32,
    ) -> (ConstraintEvent, bool) {
        let d_m = support
            .iter()
            .map(|&(i, alpha)| self.costs[i] / alpha)
            .fold(f64::INFINITY, f64::min);
        let start: Vec<f64> = support.iter().map(|&(i, _)| self.x[i]).collect();
        let mut t = 0.0;
        let mut full_steps = 0u32;
        let mut partial_step = None;
        let mut step_shape = true;
        let mut newly_frozen = Vec::new();
        let kf = k as f64;

        let lhs = |x: &[f64]| support.iter().map(|&(i, a)| a * x[i]).sum::<f64>();
        while lhs(&self.x) < 1.0 - RESIDUAL_TOL {
            let caps = delta_caps(&self.x, &support, &self.costs, &self.upper, d_m, tau, k);
            let delta = caps.iter().copied().fold(1.0, f64::min);
            assert!(delta > 0.0, "non-positive step: frozen-set bookkeeping is inconsistent");
            if partial_step.is_some() {
                step_shape = false;
            }
            for (&(i, alpha), &cap) in support.iter().zip(&caps) {
                let ratio = d_m * alpha / self.costs[i];
                let bound = tau * self.upper[i] as f64;
                let next = (1.0 + delta * ratio) * self.x[i] + delta * ratio / (kf * alpha);
                if cap <= delta || next >= bound {
                    self.x[i] = bound;
                    self.frozen[i] = true;
                    newly_frozen.push(i);
                } else {
                    self.x[i] = next;
                }
            }
            t += delta;
            if delta < 1.0 {
                partial_step = Some(delta);
            } else {
                full_steps += 1;
            }
            if !newly_frozen.is_empty() {
                break;
            }
        }
        let froze = !newly_frozen.is_empty();

        let primal_delta: f64 = support
            .iter()
            .zip(&start)
            .map(|(&(i, _), &s)| self.costs[i] * (self.x[i] - s))
            .sum();
        let residual_implies_row =
            lhs(&self.x) < 1.0 - RESIDUAL_TOL || row.lhs(&self.bar_x()) >= 1.0 - FEAS_TOL;

        let (h, update) =
            self.ledger.credit(support.clone(), d_m, t, &self.costs, log_k as f64);
        self.windows.extend(update.decreases.iter().map(|d| d.window));
        let log_kf = log_k as f64;
        let checks = ConstraintChecks {
            step_bound: t <= 2.0 * log_kf,
            step_shape,
            primal_increase: le_rel(primal_delta, 2.0 * t * d_m),
            new_dual_load: support
                .iter()
                .all(|&(i, a)| le_rel(a * d_m * t, 2.0 * log_kf * self.costs[i])),
            prefix_window: update
                .decreases
                .iter()
                .all(|d| ge_rel(d.window, 3.0) && le_rel(d.window, 5.0)),
            dual_feasible: support
                .iter()
                .all(|&(i, _)| le_rel(self.ledger.lhs(i), 12.0 * log_kf * self.costs[i])),
            dual_increase: ge_rel(update.net(), 0.5 * d_m * t),
            residual_implies_row,
        };
        self.constraints.push(GeneratedConstraint {
            source_row: j,
            support,
            residual_b: b,
            d_m,
            t,
            full_steps,
            partial_step,
            k_at_generation: k,
        });
        let event = ConstraintEvent {
            h,
            source_row: j,
            support_len: self.constraints[h].support.len(),
            residual_b: b,
            d_m,
            t,
            primal_delta,
            dual_delta: update.net(),
            frozen: newly_frozen,
            decreases: update.decreases,
            checks,
        };
        (event, froze)
    }

    /// Whole-state invariants: dual feasibility, primal versus dual, step
    /// bounds, knapsack-cover witnesses, and `x̄` feasibility.
    pub fn check_invariants(&self) -> LemmaReport {
        let mut report = LemmaReport::default();
        let log_k = self.tracker.log2_k() as f64;
        let bad_steps = self
            .constraints
            .iter()
            .filter(|c| c.t > 2.0 * f64::from(c.k_at_generation.trailing_zeros()))
            .count();
        report.push(Check::with_detail(
            "box.step_bound",
            bad_steps == 0,
            format!("{bad_steps} of {} residual constraints", self.constraints.len()),
        ));
        let feasible = (0..self.costs.len())
            .all(|i| le_rel(self.ledger.lhs(i), 12.0 * log_k * self.costs[i]));
        report.push(Check::new("box.dual_feasible", feasible));
        let primal = self.primal_cost();
        let dual = self.ledger.recomputed_total();
        report.push(Check::with_detail(
            "box.primal_vs_dual",
            le_rel(primal, 4.0 * dual),
            format!("c.x = {primal:.6}, 4 * dual = {:.6}", 4.0 * dual),
        ));
        report.push(Check::new(
            "box.prefix_window",
            self.windows.iter().all(|&w| ge_rel(w, 3.0) && le_rel(w, 5.0)),
        ));
        report.push(Check::new("box.kc_witness", self.kc_log.iter().all(|k| k.passed)));
        let xbar = self.bar_x();
        report.push(Check::new(
            "box.xbar_feasible",
            self.rows.iter().all(|r| r.lhs(&xbar) >= 1.0 - FEAS_TOL),
        ));
        report.push(Check::new(
            "box.xbar_in_box",
            xbar.iter().zip(&self.upper).all(|(&v, &u)| v >= 0.0 && v <= u as f64),
        ));
        report
    }

    /// Checks that an integral solution with value `ip_opt_value` satisfies
    /// every generated residual constraint, and that the dual total stays
    /// within `12 log2 k` times that value.
    pub fn check_p_to_pprime(&self, integral: &[f64], ip_opt_value: f64) -> bool {
        let covered = self
            .constraints
            .iter()
            .all(|c| c.lhs(integral) >= 1.0 - 1e-9);
        let log_k = self.tracker.log2_k() as f64;
        covered && le_rel(self.ledger.recomputed_total(), 12.0 * log_k * ip_opt_value)
    }
}
