//! Dense-tableau simplex with Bland's rule.
//!
//! The covering LP `min c.x  s.t.  A x >= b, x <= u, x >= 0` is solved through
//! its packing dual `max b.y - u.z  s.t.  A^T y - z <= c, y, z >= 0`, whose
//! origin is feasible because `c >= 0`. The optimal `x` is read off the
//! reduced costs of the slack columns.

use super::{CoveringProgram, OracleResult, OracleStatus};

const PIVOT_EPS: f64 = 1e-12;

pub fn lp_opt(p: &CoveringProgram) -> OracleResult {
    let n = p.n();
    let m = p.rows.len();
    let nz = if p.upper.is_some() { n } else { 0 };
    let cols = m + nz + n;
    let rhs = cols;

    let mut tab = vec![vec![0.0; cols + 1]; n];
    for (j, row) in p.rows.iter().enumerate() {
        for &(i, a) in &row.entries {
            tab[i][j] = a;
        }
    }
    for i in 0..n {
        if nz > 0 {
            tab[i][m + i] = -1.0;
        }
        tab[i][m + nz + i] = 1.0;
        tab[i][rhs] = p.costs[i];
    }
    let mut obj = vec![0.0; cols + 1];
    for (j, row) in p.rows.iter().enumerate() {
        obj[j] = -row.rhs;
    }
    if let Some(u) = &p.upper {
        for i in 0..n {
            obj[m + i] = u[i] as f64;
        }
    }
    let mut basis: Vec<usize> = (0..n).map(|i| m + nz + i).collect();

    while let Some(e) = (0..cols).find(|&j| obj[j] < -PIVOT_EPS) {
        let mut leave: Option<(f64, usize)> = None;
        for r in 0..n {
            let a = tab[r][e];
            if a <= PIVOT_EPS {
                continue;
            }
            let ratio = tab[r][rhs] / a;
            let better = match leave {
                None => true,
                Some((best, lr)) => ratio < best || (ratio == best && basis[r] < basis[lr]),
            };
            if better {
                leave = Some((ratio, r));
            }
        }
        let Some((_, r)) = leave else {
            // dual unbounded: some row cannot be covered even at x = u
            return OracleResult::without_solution(OracleStatus::Infeasible, n);
        };
        pivot(&mut tab, &mut obj, r, e);
        basis[r] = e;
    }

    let x: Vec<f64> = (0..n).map(|i| obj[m + nz + i].max(0.0)).collect();
    let x = match &p.upper {
        Some(u) => x.iter().zip(u).map(|(&v, &b)| v.min(b as f64)).collect(),
        None => x,
    };
    OracleResult { value: p.cost(&x), argument: x, status: OracleStatus::Optimal }
}

fn pivot(tab: &mut [Vec<f64>], obj: &mut [f64], r: usize, e: usize) {
    let p = tab[r][e];
    for v in tab[r].iter_mut() {
        *v /= p;
    }
    tab[r][e] = 1.0;
    let prow = tab[r].clone();
    for (q, row) in tab.iter_mut().enumerate() {
        if q == r {
            continue;
        }
        let f = row[e];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            row[e] = 0.0;
        }
    }
    let f = obj[e];
    if f != 0.0 {
        for (v, pv) in obj.iter_mut().zip(&prow) {
            *v -= f * pv;
        }
        obj[e] = 0.0;
    }
}
