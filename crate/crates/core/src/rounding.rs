//! Online randomized rounding with alterations.
//!
//! Each variable gets one uniform threshold `rho_i`. After the fractional
//! solver has handled row `j`, the rounded vector `Z` is
//!
//! ```text
//! Z_i = 0                if x_i <  tau * rho_i
//!       ceil(x_i / tau)  if tau * rho_i <= x_i < tau * u_i
//!       u_i              if x_i >= tau * u_i
//! ```
//!
//! and the integral solution is `X = max(X, Z)`. When that still leaves row
//! `j` uncovered, a greedy covering-knapsack solution on the unfrozen
//! variables is merged in.

use crate::model::ConstraintRow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Coverage slack for knapsack solutions. Kept below the feasibility
/// tolerance of the integral solution so rescaling cannot push it under.
const COVER_TOL: f64 = 1e-13;

#[derive(Debug, Error, PartialEq)]
pub enum RoundingError {
    #[error("covering knapsack is infeasible: max coverage {0} < 1")]
    InfeasibleKnapsack(f64),
    #[error("row {row} needs an alteration although its frozen variables cover {mass} >= 1")]
    FrozenCovered { row: usize, mass: f64 },
    #[error("row references x{var} but the state has {n} variables")]
    UnknownVariable { var: usize, n: usize },
}

/// The threshold `rho_i` for `(seed, var)`. Draws are keyed by variable index,
/// so they do not depend on arrival order.
pub fn rho_for(seed: u64, var: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(var as u64);
    rng.gen::<f64>()
}

/// Rounded value of one coordinate.
pub fn compute_z(x: f64, rho: f64, tau: f64, u: u64) -> u64 {
    let uf = u as f64;
    if x >= tau * uf {
        u
    } else if x >= tau * rho {
        ((x / tau).ceil() as u64).min(u)
    } else {
        0
    }
}

/// Greedy for `min c.w  s.t.  sum_i a_i w_i >= 1,  0 <= w <= u,  w integral`.
///
/// Units are scanned in non-decreasing `c_i / a_i` order (ties by index). A
/// unit that would complete the cover is not taken; instead "units taken so
/// far plus this unit" becomes a candidate and the scan continues. The
/// cheapest candidate is returned, which costs at most twice the optimum.
pub fn greedy_knapsack(costs: &[f64], coeffs: &[f64], bounds: &[u64]) -> Result<Vec<u64>, RoundingError> {
    let n = costs.len();
    let reach: f64 = coeffs.iter().zip(bounds).map(|(a, &u)| a * u as f64).sum();
    if reach < 1.0 - COVER_TOL {
        return Err(RoundingError::InfeasibleKnapsack(reach));
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| coeffs[i] > 0.0 && bounds[i] > 0).collect();
    order.sort_by(|&p, &q| {
        (costs[p] / coeffs[p])
            .partial_cmp(&(costs[q] / coeffs[q]))
            .expect("finite ratios")
            .then(p.cmp(&q))
    });

    let mut taken = vec![0u64; n];
    let mut coverage = 0.0;
    let mut spent = 0.0;
    // (cost, position in order, units of that variable)
    let mut best: Option<(f64, usize, u64)> = None;
    for (pos, &i) in order.iter().enumerate() {
        let a = coeffs[i];
        let need = units_to_cover(coverage, a);
        if need <= bounds[i] {
            let cost = spent + need as f64 * costs[i];
            if best.is_none_or(|(c, _, _)| cost < c) {
                best = Some((cost, pos, need));
            }
            taken[i] = need - 1;
        } else {
            taken[i] = bounds[i];
        }
        coverage += taken[i] as f64 * a;
        spent += taken[i] as f64 * costs[i];
    }

    let (_, pos, units) = best.ok_or(RoundingError::InfeasibleKnapsack(reach))?;
    let mut w = vec![0u64; n];
    for &i in &order[..pos] {
        w[i] = taken[i];
    }
    w[order[pos]] = units;
    Ok(w)
}

/// Smallest `m >= 1` with `coverage + m * a >= 1 - COVER_TOL`.
fn units_to_cover(coverage: f64, a: f64) -> u64 {
    let gap = 1.0 - COVER_TOL - coverage;
    if gap <= a {
        return 1;
    }
    let mut m = (gap / a).ceil().max(1.0) as u64;
    while m > 1 && coverage + (m - 1) as f64 * a >= 1.0 - COVER_TOL {
        m -= 1;
    }
    while coverage + m as f64 * a < 1.0 - COVER_TOL {
        m += 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Alteration {
    pub row: usize,
    /// `(i, amount)` raised above the max-merged value.
    pub raised: Vec<(usize, u64)>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvanceEvent {
    pub row: usize,
    pub tau: f64,
    pub alteration: Option<Alteration>,
    pub feasible: bool,
    pub monotone: bool,
    pub z_monotone: bool,
    pub in_bounds: bool,
}

impl AdvanceEvent {
    pub fn checks(&self) -> [crate::checks::Check; 3] {
        use crate::checks::Check;
        [
            Check::new("round.feasible", self.feasible),
            Check::new("round.monotone", self.monotone && self.z_monotone),
            Check::new("round.in_bounds", self.in_bounds),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct IntegralState {
    seed: u64,
    costs: Vec<f64>,
    upper: Vec<u64>,
    rho: Vec<Option<f64>>,
    z: Vec<u64>,
    x: Vec<u64>,
    alterations: Vec<Alteration>,
    rows: usize,
}

impl IntegralState {
    pub fn new(costs: Vec<f64>, upper: Vec<u64>, seed: u64) -> Self {
        let n = costs.len();
        IntegralState {
            seed,
            costs,
            upper,
            rho: vec![None; n],
            z: vec![0; n],
            x: vec![0; n],
            alterations: Vec::new(),
            rows: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn x(&self) -> &[u64] {
        &self.x
    }

    pub fn z(&self) -> &[u64] {
        &self.z
    }

    /// Thresholds drawn so far (`None` for variables not yet seen).
    pub fn rho(&self) -> &[Option<f64>] {
        &self.rho
    }

    pub fn alterations(&self) -> &[Alteration] {
        &self.alterations
    }

    pub fn cost(&self) -> f64 {
        self.x.iter().zip(&self.costs).map(|(&v, c)| v as f64 * c).sum()
    }

    /// Replaces the threshold of `var` (fixtures pinning a draw).
    pub fn pin_rho(&mut self, var: usize, rho: f64) {
        self.rho[var] = Some(rho);
    }

    /// Rounds after row `row` (normalized) has been handled by the fractional
    /// solver, whose vector and frozen set are `x_after` and `frozen`.
    pub fn advance(
        &mut self,
        x_after: &[f64],
        row: &ConstraintRow,
        frozen: &[bool],
        tau: f64,
    ) -> Result<AdvanceEvent, RoundingError> {
        let n = self.costs.len();
        if let Some(var) = row.indices().find(|&i| i >= n) {
            return Err(RoundingError::UnknownVariable { var, n });
        }
        let j = self.rows;
        self.rows += 1;
        for i in row.indices() {
            if self.rho[i].is_none() {
                self.rho[i] = Some(rho_for(self.seed, i));
            }
        }

        let prev_x = self.x.clone();
        let mut z_monotone = true;
        for i in 0..n {
            let Some(rho) = self.rho[i] else { continue };
            let z = if frozen[i] { self.upper[i] } else { compute_z(x_after[i], rho, tau, self.upper[i]) };
            z_monotone &= z >= self.z[i];
            self.z[i] = z;
            self.x[i] = self.x[i].max(z);
        }

        let lhs = |x: &[u64]| row.entries.iter().map(|&(i, a)| a * x[i] as f64).sum::<f64>();
        let mut alteration = None;
        if lhs(&self.x) < 1.0 - crate::checks::FEAS_TOL {
            let mass: f64 = row
                .entries
                .iter()
                .filter(|&&(i, _)| frozen[i])
                .map(|&(i, a)| a * self.upper[i] as f64)
                .sum();
            if mass >= 1.0 {
                return Err(RoundingError::FrozenCovered { row: j, mass });
            }
            let residual = 1.0 - mass;
            let open: Vec<(usize, f64)> = row
                .entries
                .iter()
                .filter(|&&(i, _)| !frozen[i])
                .map(|&(i, a)| (i, (a / residual).min(1.0)))
                .collect();
            let costs: Vec<f64> = open.iter().map(|&(i, _)| self.costs[i]).collect();
            let coeffs: Vec<f64> = open.iter().map(|&(_, a)| a).collect();
            let bounds: Vec<u64> = open.iter().map(|&(i, _)| self.upper[i]).collect();
            let w = greedy_knapsack(&costs, &coeffs, &bounds)?;
            let mut raised = Vec::new();
            let mut cost = 0.0;
            for (&(i, _), &wi) in open.iter().zip(&w) {
                if wi > self.x[i] {
                    let amount = wi - self.x[i];
                    cost += amount as f64 * self.costs[i];
                    raised.push((i, amount));
                    self.x[i] = wi;
                }
            }
            let alt = Alteration { row: j, raised, cost };
            self.alterations.push(alt.clone());
            alteration = Some(alt);
        }

        Ok(AdvanceEvent {
            row: j,
            tau,
            alteration,
            feasible: lhs(&self.x) >= 1.0 - crate::checks::FEAS_TOL,
            monotone: self.x.iter().zip(&prev_x).all(|(a, b)| a >= b),
            z_monotone,
            in_bounds: self.x.iter().zip(&self.upper).all(|(&v, &u)| v <= u),
        })
    }

    /// Realized cost of `Z` and total cost of all alterations.
    pub fn cost_decomposition(&self) -> (f64, f64) {
        let cost_z = self.z.iter().zip(&self.costs).map(|(&v, c)| v as f64 * c).sum();
        let cost_alt = self.alterations.iter().fold(0.0, |s, a| s + a.cost);
        (cost_z, cost_alt)
    }
}
