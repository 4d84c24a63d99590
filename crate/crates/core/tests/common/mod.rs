#![allow(dead_code)]

use online_covering::harness::{gen_random, GenParams};
use online_covering::model::normalize_row;
use online_covering::{ConstraintRow, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FEAS: f64 = 1e-12;
pub const REL: f64 = 1e-9;

pub fn le(l: f64, r: f64) -> bool {
    l <= r + REL * r.abs()
}

/// Pure covering LPs: n <= 12, m <= 20, k_max <= 4, coefficients in [0.1, 2].
pub fn clp_suite(count: u64) -> Vec<Instance> {
    (0..count)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + s);
            let n = rng.gen_range(2..=12);
            let m = rng.gen_range(1..=20);
            let k = rng.gen_range(1..=4usize).min(n);
            gen_random(&GenParams::clp(n, m, k, s)).unwrap()
        })
        .collect()
}

/// Box instances with u <= 3, small enough for the IP oracle.
pub fn box_suite(count: u64) -> Vec<Instance> {
    (0..count)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(20_000 + s);
            let n = rng.gen_range(2..=8);
            let m = rng.gen_range(1..=15);
            let k = rng.gen_range(1..=4usize).min(n);
            gen_random(&GenParams::cip(n, m, k, 3, 50_000 + s)).unwrap()
        })
        .collect()
}

pub fn normalized(row: &ConstraintRow) -> ConstraintRow {
    normalize_row(row).unwrap()
}

pub fn covers(row: &ConstraintRow, x: &[f64]) -> bool {
    normalized(row).lhs(x) >= 1.0 - FEAS
}

pub fn cost(c: &[f64], x: &[f64]) -> f64 {
    c.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Knapsack-cover inequality of a normalized row for frozen set `h`.
pub fn kc_holds(row: &ConstraintRow, x: &[f64], h: &[bool], u: &[u64]) -> bool {
    let mass: f64 = row.entries.iter().filter(|e| h[e.0]).map(|&(i, a)| a * u[i] as f64).sum();
    if mass >= 1.0 {
        return true;
    }
    let rest = 1.0 - mass;
    let lhs: f64 = row.entries.iter().filter(|e| !h[e.0]).map(|&(i, a)| a.min(rest) * x[i]).sum();
    lhs >= rest * (1.0 - REL)
}

/// Exhaustive optimum of `min c.w, sum a w >= 1, 0 <= w <= u`.
pub fn brute_knapsack(c: &[f64], a: &[f64], u: &[u64]) -> Option<f64> {
    let n = c.len();
    let mut w = vec![0u64; n];
    let mut best: Option<f64> = None;
    loop {
        let cover: f64 = a.iter().zip(&w).map(|(x, &y)| x * y as f64).sum();
        if cover >= 1.0 - FEAS {
            let v: f64 = c.iter().zip(&w).map(|(x, &y)| x * y as f64).sum();
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
        let mut d = 0;
        while d < n && w[d] == u[d] {
            w[d] = 0;
            d += 1;
        }
        if d == n {
            return best;
        }
        w[d] += 1;
    }
}

/// Random covering-knapsack instance with `prod (u_i + 1) <= limit` and
/// `sum a u >= 1`.
pub fn knapsack_instance(seed: u64, limit: u64) -> (Vec<f64>, Vec<f64>, Vec<u64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(1..=10);
        let u: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        if u.iter().map(|&v| v + 1).product::<u64>() > limit {
            continue;
        }
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..=1.0)).collect();
        if a.iter().zip(&u).map(|(x, &y)| x * y as f64).sum::<f64>() < 1.0 {
            continue;
        }
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..=5.0)).collect();
        return (c, a, u);
    }
}
