//! Adaptive adversary against guess-and-double primal-dual algorithms.
//!
//! A seed constraint `x_0 >= rho^(rho+2)` fixes `alpha_1`. Each phase `r`
//! then walks through fresh variables, issuing `x >= rho^h` for
//! `h = 0, 1, ...` until the algorithm answers with a dual below
//! `rho^(h-1)`. The phase ends as soon as the algorithm's phase primal
//! exceeds `alpha_r`, and `alpha_{r+1} = 2 alpha_r`. Against any algorithm
//! that keeps its duals monotone and feasible within a phase, the dual stays
//! within `4/rho` of the primal.

use crate::checks::{le_rel, Check, LemmaReport, REL_TOL};
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_PHASES: u32 = 3;
pub const MIN_RHO: u32 = 3;
pub const MAX_RHO: u32 = 16;

#[derive(Debug, Error, PartialEq)]
pub enum AdversaryError {
    #[error("rho must be an integer in [{MIN_RHO}, {MAX_RHO}], got {0}")]
    BadRho(u32),
    #[error("greediness must lie in (0, 1], got {0}")]
    BadGreediness(f64),
    #[error("FRAMEWORK_VIOLATION in phase {phase}, x{var}, h={h}: {reason}")]
    FrameworkViolation { phase: u32, var: u64, h: u32, reason: String },
}

/// The algorithm's answer to `x_var >= rho^h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    /// Value of `x_var` after the update.
    pub primal: f64,
    /// Dual assigned to the new constraint.
    pub dual: f64,
}

pub trait GdAlgorithm {
    fn on_constraint(&mut self, var: u64, h: u32, bound: u128) -> Response;
    /// Called at the start of every phase; all duals must drop to zero.
    fn on_phase_reset(&mut self);
    fn primal_cost(&self) -> f64;
    fn dual_total(&self) -> f64;
}

/// Raises each variable to exactly its bound and gives the new dual
/// `g * rho^h * (1 - sum_{h' < h} y(h') / rho^h')`.
#[derive(Debug, Clone)]
pub struct ReferenceGd {
    greediness: f64,
    primal: f64,
    dual: f64,
    var: Option<u64>,
    x: f64,
    load: f64,
}

impl ReferenceGd {
    pub fn new(greediness: f64) -> Result<Self, AdversaryError> {
        if !(greediness > 0.0 && greediness <= 1.0) {
            return Err(AdversaryError::BadGreediness(greediness));
        }
        Ok(ReferenceGd { greediness, primal: 0.0, dual: 0.0, var: None, x: 0.0, load: 0.0 })
    }

    pub fn greediness(&self) -> f64 {
        self.greediness
    }
}

impl GdAlgorithm for ReferenceGd {
    #[inline]
    fn on_constraint(&mut self, var: u64, _h: u32, bound: u128) -> Response {
        if self.var != Some(var) {
            self.var = Some(var);
            self.x = 0.0;
            self.load = 0.0;
        }
        // u64 -> f64 is far cheaper than the 128-bit conversion
        let b = u64::try_from(bound).map_or(bound as f64, |v| v as f64);
        if b > self.x {
            self.primal += b - self.x;
            self.x = b;
        }
        let share = (self.greediness * (1.0 - self.load)).max(0.0);
        let y = share * b;
        self.load += share;
        self.dual += y;
        Response { primal: self.x, dual: y }
    }

    #[inline]
    fn on_phase_reset(&mut self) {
        self.dual = 0.0;
        self.var = None;
        self.load = 0.0;
    }

    #[inline]
    fn primal_cost(&self) -> f64 {
        self.primal
    }

    #[inline]
    fn dual_total(&self) -> f64 {
        self.dual
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRecord {
    pub bound: u128,
    pub primal: f64,
    pub dual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub phase: u32,
    pub alpha: f64,
    /// Number of variables used, `q`.
    pub variables: u64,
    /// Histogram of sequence lengths: `(h_j, how many variables)`, by `h_j`.
    pub h_counts: Vec<(u32, u64)>,
    /// Algorithm primal cost accrued during the phase, `P(r)`.
    pub primal: f64,
    pub dual: f64,
    pub constraints: u64,
    /// Whether the primal exceeded `alpha`.
    pub completed: bool,
}

impl PhaseRecord {
    pub fn max_h(&self) -> u32 {
        self.h_counts.iter().map(|&(h, _)| h).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversaryTrace {
    pub rho: u32,
    pub seed: SeedRecord,
    pub phases: Vec<PhaseRecord>,
    /// Largest support of any issued constraint.
    pub max_support: usize,
}

impl AdversaryTrace {
    pub fn total_primal(&self) -> f64 {
        self.phases.iter().fold(0.0, |s, p| s + p.primal)
    }

    pub fn total_dual(&self) -> f64 {
        self.phases.iter().fold(0.0, |s, p| s + p.dual)
    }
}

/// Runs the adversary for `max_phases` phases.
pub fn run_adversary<A: GdAlgorithm + ?Sized>(
    algo: &mut A,
    rho: u32,
    max_phases: u32,
) -> Result<AdversaryTrace, AdversaryError> {
    if !(MIN_RHO..=MAX_RHO).contains(&rho) {
        return Err(AdversaryError::BadRho(rho));
    }
    let violation = |phase, var, h, reason: String| AdversaryError::FrameworkViolation { phase, var, h, reason };

    let seed_h = rho + 2;
    let seed_bound = (rho as u128).pow(seed_h);
    let before = algo.dual_total();
    let resp = algo.on_constraint(0, seed_h, seed_bound);
    if resp.primal < seed_bound as f64 {
        return Err(violation(0, 0, seed_h, format!("x = {} below bound", resp.primal)));
    }
    let seed = SeedRecord { bound: seed_bound, primal: algo.primal_cost(), dual: algo.dual_total() - before };

    // one entry per exponent whose bound fits in u128
    let steps: Vec<Step> = std::iter::successors(Some(1u128), |p| p.checked_mul(rho as u128))
        .enumerate()
        .map(|(h, bound)| {
            let value = bound as f64;
            // after answering exponent h, stop if y(h) < rho^(h-1)
            let stop = if h == 0 { 1.0 / rho as f64 } else { value / rho as f64 };
            Step { bound, value, inv: 1.0 / value, stop }
        })
        .collect();

    let mut alpha = seed_bound as f64;
    let mut next_var = 1u64;
    let mut phases = Vec::new();
    for phase in 1..=max_phases {
        algo.on_phase_reset();
        if algo.dual_total() != 0.0 {
            return Err(violation(phase, 0, 0, format!("dual {} after reset", algo.dual_total())));
        }
        let start = algo.primal_cost();
        let mut dual = 0.0f64;
        let mut rec = PhaseRecord {
            phase,
            alpha,
            variables: 0,
            h_counts: Vec::new(),
            primal: 0.0,
            dual: 0.0,
            constraints: 0,
            completed: false,
        };
        // counts[h]: variables whose sequence had h constraints
        let mut counts = vec![0u64; steps.len() + 1];
        let mut issued = 0u64;
        'vars: loop {
            let var = next_var;
            next_var += 1;
            let mut load = 0.0;
            for (h, step) in steps.iter().enumerate() {
                let r = algo.on_constraint(var, h as u32, step.bound);
                let total = algo.dual_total();
                if r.primal < step.value || !(r.dual >= 0.0) || total < dual - REL_TOL * dual.abs() {
                    return Err(response_violation(phase, var, h, r, step, total, dual));
                }
                dual = total;
                load += r.dual * step.inv;
                if load > 1.0 + REL_TOL {
                    return Err(violation(phase, var, h as u32, format!("dual constraint load {load} > 1")));
                }
                issued += 1;
                if algo.primal_cost() - start > alpha {
                    counts[h + 1] += 1;
                    rec.completed = true;
                    break 'vars;
                }
                if r.dual < step.stop {
                    counts[h + 1] += 1;
                    continue 'vars;
                }
            }
            return Err(violation(phase, var, steps.len() as u32, "sequence outran 128-bit bounds".into()));
        }
        rec.h_counts = (0..).zip(counts).filter(|&(_, c)| c > 0).collect();
        rec.variables = rec.h_counts.iter().map(|&(_, c)| c).sum();
        rec.constraints = issued;
        rec.primal = algo.primal_cost() - start;
        rec.dual = algo.dual_total();
        phases.push(rec);
        alpha *= 2.0;
    }
    Ok(AdversaryTrace { rho, seed, phases, max_support: 1 })
}

struct Step {
    bound: u128,
    value: f64,
    inv: f64,
    stop: f64,
}

#[cold]
fn response_violation(phase: u32, var: u64, h: usize, r: Response, step: &Step, total: f64, before: f64) -> AdversaryError {
    let reason = if r.primal < step.value {
        format!("x = {} below bound {}", r.primal, step.value)
    } else if !(r.dual >= 0.0) {
        format!("negative dual {}", r.dual)
    } else {
        format!("dual total fell from {before} to {total} within phase")
    };
    AdversaryError::FrameworkViolation { phase, var, h: h as u32, reason }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub report: LemmaReport,
    pub global_primal: f64,
    pub global_dual: f64,
}

impl ClaimReport {
    pub fn all_passed(&self) -> bool {
        self.report.all_passed()
    }

    /// Realized primal/dual gap.
    pub fn gap(&self) -> f64 {
        self.global_primal / self.global_dual
    }
}

pub fn validate_claims(trace: &AdversaryTrace) -> ClaimReport {
    let rho = trace.rho as f64;
    let mut report = LemmaReport::default();
    for p in &trace.phases {
        let tag = |what: String| format!("phase {}: {what}", p.phase);
        let max_h = p.max_h();
        report.push(Check::with_detail(
            "claim.h_bound",
            max_h <= trace.rho + 1,
            tag(format!("max h_j = {max_h}")),
        ));
        report.push(Check::with_detail(
            "claim.phase_dual",
            le_rel(p.dual, 4.0 / rho * p.primal),
            tag(format!("dual {} vs primal {}", p.dual, p.primal)),
        ));
        if p.completed {
            report.push(Check::with_detail(
                "claim.phase_primal",
                p.primal >= p.alpha,
                tag(format!("P = {} vs alpha = {}", p.primal, p.alpha)),
            ));
            report.push(Check::with_detail("claim.q_at_least_2", p.variables >= 2, tag(format!("q = {}", p.variables))));
        }
    }
    let global_primal = trace.total_primal();
    let global_dual = trace.total_dual();
    report.push(Check::with_detail(
        "claim.global_ratio",
        le_rel(global_dual, 4.0 / rho * global_primal),
        format!("dual/primal = {}", global_dual / global_primal),
    ));
    report.push(Check::new("trace.single_variable", trace.max_support <= 1));
    ClaimReport { report, global_primal, global_dual }
}
