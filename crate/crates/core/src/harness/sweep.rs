use super::{gen_random, run_clp, run_fractional, run_rounding, GenParams, HarnessError, RunOptions};
use crate::box_kc::Tau;
use crate::model::SparsityTracker;
use crate::oracles::{ip_opt, lp_opt, CoveringProgram};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default)]
    pub families: Vec<FamilyConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub name: String,
    /// Instance `i` of the family uses seed `params.seed + i`.
    #[serde(flatten)]
    pub params: GenParams,
    pub instances: usize,
    #[serde(default = "default_rounding_seeds")]
    pub rounding_seeds: u64,
}

fn default_rounding_seeds() -> u64 {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySummary {
    pub name: String,
    pub instances: usize,
    pub k_est: u64,
    pub fractional_max: f64,
    pub fractional_mean: f64,
    pub fractional_envelope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral_envelope: Option<f64>,
    pub checks_run: u64,
    pub checks_failed: u64,
    pub skipped: usize,
}

struct Sample {
    k_est: u64,
    fractional: f64,
    integral: Option<f64>,
    checks_run: u64,
    checks_failed: u64,
}

fn run_one(p: &GenParams, rounding_seeds: u64) -> Result<Option<Sample>, HarnessError> {
    let inst = gen_random(p)?;
    let opts = RunOptions { check_invariants: true, oracle: false, tau: Tau::default() };
    if inst.upper_bounds().is_none() {
        let rep = run_clp(&inst, &RunOptions { oracle: true, ..opts })?;
        let lp = rep.summary.lp_opt.expect("oracle requested");
        return Ok(Some(Sample {
            k_est: rep.summary.k_est,
            fractional: rep.summary.primal_cost / lp,
            integral: None,
            checks_run: rep.summary.checks.run,
            checks_failed: rep.summary.checks.failed,
        }));
    }
    let frac = run_fractional(&inst, &opts)?;
    if frac.infeasible_row.is_some() {
        return Ok(None);
    }
    let prog = CoveringProgram::from(&inst);
    let lp = lp_opt(&prog).value;
    let ip = ip_opt(&prog);
    let mut tally = frac.tally.clone();
    let mut total = 0.0;
    for seed in 0..rounding_seeds {
        let r = run_rounding(&inst, &frac, seed, true)?;
        tally.merge(&r.tally);
        total += r.state.cost();
    }
    let integral = (ip.is_optimal() && rounding_seeds > 0).then(|| total / rounding_seeds as f64 / ip.value);
    Ok(Some(Sample {
        k_est: frac.state.tracker().k_est(),
        fractional: frac.state.primal_cost() / lp,
        integral,
        checks_run: tally.run,
        checks_failed: tally.failed,
    }))
}

/// Per-family competitive ratios against the oracles. Instances run in
/// parallel; results are aggregated in instance order.
pub fn ratio_sweep(config: &SweepConfig) -> Result<Vec<FamilySummary>, HarnessError> {
    config.families.iter().map(sweep_family).collect()
}

fn sweep_family(f: &FamilyConfig) -> Result<FamilySummary, HarnessError> {
    let samples: Vec<Option<Sample>> = (0..f.instances)
        .into_par_iter()
        .map(|i| {
            let p = GenParams { seed: f.params.seed.wrapping_add(i as u64), ..f.params.clone() };
            run_one(&p, f.rounding_seeds)
        })
        .collect::<Result<_, _>>()?;
    let done: Vec<&Sample> = samples.iter().flatten().collect();
    let k_est = done.iter().map(|s| s.k_est).max().unwrap_or(2);
    let log_k = f64::from(k_est.trailing_zeros());
    let fr: Vec<f64> = done.iter().map(|s| s.fractional).collect();
    let ir: Vec<f64> = done.iter().filter_map(|s| s.integral).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let max = |v: &[f64]| v.iter().copied().fold(f64::NAN, f64::max);
    let boxed = f.params.u_max.is_some();
    let tau = Tau::default().resolve(&SparsityTracker::new());
    Ok(FamilySummary {
        name: f.name.clone(),
        instances: f.instances,
        k_est,
        fractional_max: max(&fr),
        fractional_mean: mean(&fr),
        fractional_envelope: 48.0 * log_k,
        integral_max: (boxed && !ir.is_empty()).then(|| max(&ir)),
        integral_mean: (boxed && !ir.is_empty()).then(|| mean(&ir)),
        integral_envelope: boxed.then(|| (2.0 / tau + 9.0 * PI * PI) * 48.0 * log_k),
        checks_run: done.iter().map(|s| s.checks_run).sum(),
        checks_failed: done.iter().map(|s| s.checks_failed).sum(),
        skipped: samples.len() - done.len(),
    })
}

/// Tab-separated table, one row per family.
pub fn format_table(rows: &[FamilySummary]) -> String {
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
    let mut out = String::from(
        "family\tinstances\tk_est\tfrac_max\tfrac_mean\tfrac_envelope\tint_max\tint_mean\tint_envelope\tchecks_failed\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.1}\t{}\t{}\t{}\t{}/{}",
            r.name,
            r.instances,
            r.k_est,
            r.fractional_max,
            r.fractional_mean,
            r.fractional_envelope,
            opt(r.integral_max),
            opt(r.integral_mean),
            r.integral_envelope.map_or("-".to_string(), |x| format!("{x:.1}")),
            r.checks_failed,
            r.checks_run,
        );
    }
    out
}
