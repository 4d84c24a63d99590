//! End-to-end runs, reports, and sweeps.

mod generate;
mod sweep;

pub use generate::{gen_random, GenParams};
pub use sweep::{format_table, ratio_sweep, FamilyConfig, FamilySummary, SweepConfig};

use crate::box_kc::{BoxArrival, BoxError, BoxState, Tau};
use crate::checks::{ge_rel, le_rel, Check, CheckTally};
use crate::clp::{ArrivalEvent, ClpError, ClpState};
use crate::model::{normalize_row, save_instance, ConstraintRow, Instance, ModelError};
use crate::oracles::{dual_feasibility_factor, ip_opt, lp_opt, CoveringProgram, OracleResult, OracleStatus};
use crate::rounding::{AdvanceEvent, Alteration, IntegralState, RoundingError};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("bad parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Mode(String),
    #[error(transparent)]
    Clp(#[from] ClpError),
    #[error(transparent)]
    Box(BoxError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub check_invariants: bool,
    pub oracle: bool,
    pub tau: Tau,
}

impl RunOptions {
    pub fn full() -> Self {
        RunOptions { check_invariants: true, oracle: true, tau: Tau::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Pass,
    InvariantFailure,
    Infeasible,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Pass => 0,
            RunStatus::InvariantFailure => 1,
            RunStatus::Infeasible => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    ClpArrival(ArrivalEvent),
    CipArrival {
        arrival: usize,
        fractional: BoxArrival,
        #[serde(skip_serializing_if = "Option::is_none")]
        rounding: Option<AdvanceEvent>,
    },
    Alteration(Alteration),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub status: RunStatus,
    pub primal_cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bar_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_alterations: Option<f64>,
    pub dual_total: f64,
    pub k_est: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ip_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ip_status: Option<OracleStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasible_row: Option<usize>,
    pub checks: CheckTally,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub digest: String,
    pub mode: &'static str,
    pub n: usize,
    pub m: usize,
    pub events: Vec<Event>,
    pub summary: Summary,
}

#[derive(Serialize)]
struct Header<'a> {
    r#type: &'static str,
    digest: &'a str,
    mode: &'a str,
    n: usize,
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Tagged<'a, T> {
    r#type: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

impl RunReport {
    /// One JSON record per line: header, events, summary.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = Header {
            r#type: "header",
            digest: &self.digest,
            mode: self.mode,
            n: self.n,
            m: self.m,
            seed: self.summary.seed,
        };
        let mut line = |v: String| {
            out.push_str(&v);
            out.push('\n');
        };
        line(serde_json::to_string(&header).expect("header serializes"));
        for e in &self.events {
            line(serde_json::to_string(e).expect("event serializes"));
        }
        line(serde_json::to_string(&Tagged { r#type: "summary", body: &self.summary }).expect("summary serializes"));
        out
    }

    pub fn status(&self) -> RunStatus {
        self.summary.status
    }
}

/// Hex sha256 of the canonical instance document.
pub fn instance_digest(inst: &Instance) -> String {
    hex::encode(Sha256::digest(save_instance(inst)))
}

fn status_of(tally: &CheckTally, infeasible: bool) -> RunStatus {
    if infeasible {
        RunStatus::Infeasible
    } else if tally.passed() {
        RunStatus::Pass
    } else {
        RunStatus::InvariantFailure
    }
}

/// Streams a pure covering LP through the fractional solver.
pub fn run_clp(inst: &Instance, opts: &RunOptions) -> Result<RunReport, HarnessError> {
    if inst.upper_bounds().is_some() {
        return Err(HarnessError::Mode("instance has upper bounds; use run_cip".into()));
    }
    let start = Instant::now();
    let mut state = ClpState::new(inst.costs().to_vec());
    let mut tally = CheckTally::default();
    let mut events = Vec::with_capacity(inst.m());
    for row in inst.rows() {
        let ev = state.arrive(row)?;
        if opts.check_invariants {
            tally.record_all(&ev.checks.as_checks());
            tally.record_all(&state.check_lemmas().checks);
        }
        events.push(Event::ClpArrival(ev));
    }

    let primal = state.primal_cost();
    let dual = state.dual_total();
    let k = state.tracker().k_est();
    let log_k = state.tracker().log2_k() as f64;
    if opts.check_invariants {
        tally.record(&Check::new("run.primal_vs_dual", le_rel(primal, 4.0 * dual)));
    }
    let mut lp = None;
    if opts.oracle {
        let r = lp_opt(&CoveringProgram::from(inst));
        let v = r.value;
        tally.record(&Check::new("run.competitive", le_rel(primal, 48.0 * log_k * v)));
        tally.record(&Check::new("run.weak_duality", le_rel(dual, 12.0 * log_k * v)));
        let factor = dual_feasibility_factor(state.dual_terms(), inst.costs());
        tally.record(&Check::new("run.dual_factor", le_rel(factor, 12.0 * log_k)));
        lp = Some(v);
    }

    let summary = Summary {
        status: status_of(&tally, false),
        primal_cost: primal,
        bar_cost: None,
        integral_cost: None,
        cost_z: None,
        cost_alterations: None,
        dual_total: dual,
        k_est: k,
        lp_opt: lp,
        ip_opt: None,
        ip_status: None,
        infeasible_row: None,
        checks: tally,
        seed: None,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(RunReport { digest: instance_digest(inst), mode: "clp", n: inst.n(), m: inst.m(), events, summary })
}

/// What the rounding step needs from arrival `j` of the fractional run.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub row: ConstraintRow,
    pub x: Vec<f64>,
    pub frozen: Vec<bool>,
    pub tau: f64,
}

/// A completed fractional box run, reusable across rounding seeds.
#[derive(Debug, Clone)]
pub struct FractionalRun {
    pub state: BoxState,
    pub arrivals: Vec<BoxArrival>,
    pub snapshots: Vec<Snapshot>,
    pub infeasible_row: Option<usize>,
    pub tally: CheckTally,
}

pub fn run_fractional(inst: &Instance, opts: &RunOptions) -> Result<FractionalRun, HarnessError> {
    let upper = inst
        .upper_bounds()
        .ok_or_else(|| HarnessError::Mode("instance has no upper bounds; use run_clp".into()))?;
    let mut state = BoxState::new(inst.costs().to_vec(), upper.to_vec());
    let mut run = FractionalRun {
        state: state.clone(),
        arrivals: Vec::new(),
        snapshots: Vec::new(),
        infeasible_row: None,
        tally: CheckTally::default(),
    };
    for (j, row) in inst.rows().iter().enumerate() {
        let ev = match state.arrive_box(row, opts.tau) {
            Ok(ev) => ev,
            Err(BoxError::Infeasible { .. }) => {
                run.infeasible_row = Some(j);
                break;
            }
            Err(e) => return Err(HarnessError::Box(e)),
        };
        if opts.check_invariants {
            run.tally.record_all(&ev.checks());
            run.tally.record_all(&state.check_invariants().checks);
        }
        run.snapshots.push(Snapshot {
            row: normalize_row(row)?,
            x: state.x().to_vec(),
            frozen: state.frozen().to_vec(),
            tau: ev.tau,
        });
        run.arrivals.push(ev);
    }
    if opts.check_invariants {
        let ok = le_rel(state.primal_cost(), 4.0 * state.dual_total());
        run.tally.record(&Check::new("run.primal_vs_dual", ok));
    }
    run.state = state;
    Ok(run)
}

#[derive(Debug, Clone)]
pub struct RoundingRun {
    pub state: IntegralState,
    pub events: Vec<AdvanceEvent>,
    pub tally: CheckTally,
}

/// Rounds a fractional run with one seed.
pub fn run_rounding(
    inst: &Instance,
    frac: &FractionalRun,
    seed: u64,
    check_invariants: bool,
) -> Result<RoundingRun, HarnessError> {
    let upper = frac.state.upper().to_vec();
    let mut state = IntegralState::new(inst.costs().to_vec(), upper, seed);
    let mut tally = CheckTally::default();
    let mut events = Vec::with_capacity(frac.snapshots.len());
    for snap in &frac.snapshots {
        let ev = state.advance(&snap.x, &snap.row, &snap.frozen, snap.tau)?;
        if check_invariants {
            tally.record_all(&ev.checks());
        }
        events.push(ev);
    }
    if check_invariants {
        let (z, alt) = state.cost_decomposition();
        tally.record(&Check::new("round.cost_decomposition", ge_rel(z + alt, state.cost())));
    }
    Ok(RoundingRun { state, events, tally })
}

/// Streams a covering IP through the box solver and the rounding step.
pub fn run_cip(inst: &Instance, seed: u64, opts: &RunOptions) -> Result<RunReport, HarnessError> {
    let start = Instant::now();
    let frac = run_fractional(inst, opts)?;
    let round = run_rounding(inst, &frac, seed, opts.check_invariants)?;
    let mut tally = frac.tally.clone();
    tally.merge(&round.tally);

    let st = &frac.state;
    let primal = st.primal_cost();
    let log_k = st.tracker().log2_k() as f64;
    let integral = round.state.cost();
    let (cost_z, cost_alt) = round.state.cost_decomposition();
    let mut lp = None;
    let mut ip: Option<OracleResult> = None;
    if opts.oracle && frac.infeasible_row.is_none() {
        let prog = CoveringProgram::from(inst);
        let l = lp_opt(&prog).value;
        let r = ip_opt(&prog);
        if r.is_optimal() {
            tally.record(&Check::new("run.relaxation_order", le_rel(l, r.value)));
            tally.record(&Check::new("run.competitive", le_rel(primal, 48.0 * log_k * r.value)));
            tally.record(&Check::new("run.p_to_pprime", st.check_p_to_pprime(&r.argument, r.value)));
            tally.record(&Check::new("run.integral_above_opt", ge_rel(integral, r.value)));
        }
        lp = Some(l);
        ip = Some(r);
    }

    let mut events = Vec::with_capacity(2 * frac.arrivals.len());
    for (j, (fractional, rounding)) in frac.arrivals.iter().zip(&round.events).enumerate() {
        let alteration = rounding.alteration.clone();
        events.push(Event::CipArrival { arrival: j, fractional: fractional.clone(), rounding: Some(rounding.clone()) });
        if let Some(a) = alteration {
            events.push(Event::Alteration(a));
        }
    }

    let summary = Summary {
        status: status_of(&tally, frac.infeasible_row.is_some()),
        primal_cost: primal,
        bar_cost: Some(inst.cost_of(&st.bar_x())),
        integral_cost: Some(integral),
        cost_z: Some(cost_z),
        cost_alterations: Some(cost_alt),
        dual_total: st.dual_total(),
        k_est: st.tracker().k_est(),
        lp_opt: lp,
        ip_opt: ip.as_ref().filter(|r| r.is_optimal()).map(|r| r.value),
        ip_status: ip.map(|r| r.status),
        infeasible_row: frac.infeasible_row,
        checks: tally,
        seed: Some(seed),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(RunReport { digest: instance_digest(inst), mode: "cip", n: inst.n(), m: inst.m(), events, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row_clp_report() {
        let inst = Instance::new(vec![1.0], None, vec![ConstraintRow::unit(vec![(0, 1.0)])]).unwrap();
        let rep = run_clp(&inst, &RunOptions::full()).unwrap();
        assert_eq!(rep.summary.primal_cost, 1.5);
        assert_eq!(rep.summary.dual_total, 2.0);
        assert!((rep.summary.lp_opt.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rep.status(), RunStatus::Pass);
        let text = rep.to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("\"header\""));
        assert!(lines[2].contains("\"summary\""));
    }

    #[test]
    fn mode_is_enforced() {
        let inst = Instance::new(vec![1.0], Some(vec![1]), vec![ConstraintRow::unit(vec![(0, 1.0)])]).unwrap();
        assert!(matches!(run_clp(&inst, &RunOptions::default()), Err(HarnessError::Mode(_))));
        let pure = Instance::new(vec![1.0], None, vec![]).unwrap();
        assert!(matches!(run_cip(&pure, 0, &RunOptions::default()), Err(HarnessError::Mode(_))));
    }

    #[test]
    fn infeasible_box_row() {
        let inst = Instance::new(vec![1.0], Some(vec![1]), vec![ConstraintRow::unit(vec![(0, 0.5)])]).unwrap();
        let rep = run_cip(&inst, 0, &RunOptions::full()).unwrap();
        assert_eq!(rep.status(), RunStatus::Infeasible);
        assert_eq!(rep.summary.infeasible_row, Some(0));
    }
}
