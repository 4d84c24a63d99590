//! Dual bookkeeping shared by the two fractional solvers.
//!
//! Each covering constraint `h` owns a dual `y_h`. When a new constraint is
//! credited, `y_h` is raised to `d_m * t` and, for every variable `i` in its
//! support whose dual constraint is already loaded above `10 log k * c_i`, the
//! oldest duals of that constraint (the prefix whose mass stays within
//! `5 log k * c_i`) are scaled down by `1 - min(1, t) * d_m / d_ih`.

use serde::Serialize;

pub(crate) const RAISE_THRESHOLD: f64 = 10.0;
pub(crate) const PREFIX_THRESHOLD: f64 = 5.0;

/// One firing of the prefix decrease for dual constraint `var`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefixDecrease {
    pub var: usize,
    /// Number of duals in the decreased prefix.
    pub prefix_len: usize,
    /// `sum_{l in P} coeff * y_l / (c_i log2 k)` measured before decreasing.
    pub window: f64,
    /// Total decrease in the dual objective caused by this firing.
    pub removed: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DualUpdate {
    pub raised: f64,
    pub removed: f64,
    pub decreases: Vec<PrefixDecrease>,
}

impl DualUpdate {
    pub fn net(&self) -> f64 {
        self.raised - self.removed
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct DualLedger {
    ys: Vec<f64>,
    supports: Vec<Vec<(usize, f64)>>,
    /// Per variable, the constraints containing it in arrival order (zero
    /// duals created with `t = 0` are never listed).
    columns: Vec<Vec<(usize, f64)>>,
    total: f64,
}

impl DualLedger {
    pub fn y(&self, h: usize) -> f64 {
        self.ys[h]
    }

    pub fn support(&self, h: usize) -> &[(usize, f64)] {
        &self.supports[h]
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn recomputed_total(&self) -> f64 {
        self.ys.iter().sum()
    }

    /// `sum_h coeff_ih * y_h` for dual constraint `var`.
    pub fn lhs(&self, var: usize) -> f64 {
        self.columns
            .get(var)
            .map(|col| col.iter().map(|&(h, a)| a * self.ys[h]).sum())
            .unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[(usize, f64)], f64)> + '_ {
        self.supports.iter().map(|s| s.as_slice()).zip(self.ys.iter().copied())
    }

    #[cfg(test)]
    pub fn ys_mut(&mut self) -> &mut [f64] {
        &mut self.ys
    }

    /// Credits a new constraint with support `support` (coefficients of that
    /// constraint), minimum ratio `d_m` and step total `t`, applying the
    /// prefix decreases first. Returns the index of the new dual and what moved.
    pub fn credit(
        &mut self,
        support: Vec<(usize, f64)>,
        d_m: f64,
        t: f64,
        costs: &[f64],
        log_k: f64,
    ) -> (usize, DualUpdate) {
        let h = self.ys.len();
        let y_h = d_m * t;
        let mut update = DualUpdate { raised: y_h, ..Default::default() };

        if t > 0.0 {
            let damping = t.min(1.0);
            for &(i, coeff) in &support {
                let c_i = costs[i];
                let Some(col) = self.columns.get(i) else { continue };
                let before: f64 = col.iter().map(|&(l, a)| a * self.ys[l]).sum();
                if before <= RAISE_THRESHOLD * log_k * c_i {
                    continue;
                }
                let cap = PREFIX_THRESHOLD * log_k * c_i;
                let mut mass = 0.0;
                let mut len = 0;
                for &(l, a) in col {
                    let next = mass + a * self.ys[l];
                    if next > cap {
                        break;
                    }
                    mass = next;
                    len += 1;
                }
                // d_m / d_ih with d_ih = c_i / coeff
                let ratio = (d_m * coeff / c_i).min(1.0);
                let factor = 1.0 - damping * ratio;
                let mut removed = 0.0;
                for &(l, _) in &col[..len] {
                    let old = self.ys[l];
                    let new = old * factor;
                    removed += old - new;
                    self.ys[l] = new;
                }
                update.removed += removed;
                update.decreases.push(PrefixDecrease {
                    var: i,
                    prefix_len: len,
                    window: mass / (c_i * log_k),
                    removed,
                });
            }
        }

        self.ys.push(y_h);
        if y_h > 0.0 {
            for &(i, coeff) in &support {
                if i >= self.columns.len() {
                    self.columns.resize_with(i + 1, Vec::new);
                }
                self.columns[i].push((h, coeff));
            }
        }
        self.supports.push(support);
        self.total += update.net();
        (h, update)
    }
}
