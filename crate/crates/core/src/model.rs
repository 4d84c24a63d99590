//! Problem data: covering rows, instances, and the online sparsity tracker.
//!
//! Every row handed to a solver has been normalized to unit right-hand side,
//! so a constraint is always `sum_i a_i x_i >= 1` with `a_i > 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("malformed row: {0}")]
    MalformedRow(String),
    #[error("non-positive cost c[{index}] = {value}")]
    NonPositiveCost { index: usize, value: f64 },
    #[error("non-integral upper bound u[{index}] = {value}")]
    NonIntegralUpperBound { index: usize, value: f64 },
    #[error("upper bound u[{index}] = {value} must be at least 1")]
    UpperBoundTooSmall { index: usize, value: f64 },
    #[error("schema violation: {0}")]
    Schema(String),
}

/// One covering constraint `sum_i a_i x_i >= rhs` stored sparsely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRow {
    pub entries: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl ConstraintRow {
    pub fn new(entries: Vec<(usize, f64)>, rhs: f64) -> Self {
        ConstraintRow { entries, rhs }
    }

    /// Unit right-hand-side row.
    pub fn unit(entries: Vec<(usize, f64)>) -> Self {
        ConstraintRow { entries, rhs: 1.0 }
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    pub fn coefficient(&self, var: usize) -> Option<f64> {
        self.entries
            .binary_search_by_key(&var, |&(i, _)| i)
            .ok()
            .map(|p| self.entries[p].1)
    }

    /// Left-hand side `sum_i a_i v_i` for a dense vector (missing entries are zero).
    pub fn lhs(&self, values: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, a)| a * values.get(i).copied().unwrap_or(0.0))
            .sum()
    }

    fn validate_shape(&self) -> Result<(), ModelError> {
        if self.entries.is_empty() {
            return Err(ModelError::MalformedRow("row has no entries".into()));
        }
        if !(self.rhs > 0.0) || !self.rhs.is_finite() {
            return Err(ModelError::MalformedRow(format!(
                "rhs must be positive, got {}",
                self.rhs
            )));
        }
        for (p, &(i, a)) in self.entries.iter().enumerate() {
            if !(a > 0.0) || !a.is_finite() {
                return Err(ModelError::MalformedRow(format!(
                    "coefficient of x{i} must be positive, got {a}"
                )));
            }
            if p > 0 && self.entries[p - 1].0 >= i {
                return Err(ModelError::MalformedRow(
                    "indices must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Divides every coefficient by the right-hand side so that the row reads
/// `sum_i (a_i / rhs) x_i >= 1`.
pub fn normalize_row(raw: &ConstraintRow) -> Result<ConstraintRow, ModelError> {
    raw.validate_shape()?;
    if raw.rhs == 1.0 {
        return Ok(raw.clone());
    }
    let entries = raw.entries.iter().map(|&(i, a)| (i, a / raw.rhs)).collect();
    Ok(ConstraintRow { entries, rhs: 1.0 })
}

/// A covering program `min c.x  s.t.  A x >= 1, 0 <= x <= u` whose rows arrive
/// in `rows` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    costs: Vec<f64>,
    upper_bounds: Option<Vec<u64>>,
    rows: Vec<ConstraintRow>,
}

impl Instance {
    pub fn new(
        costs: Vec<f64>,
        upper_bounds: Option<Vec<u64>>,
        rows: Vec<ConstraintRow>,
    ) -> Result<Self, ModelError> {
        let n = costs.len();
        for (index, &value) in costs.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ModelError::NonPositiveCost { index, value });
            }
        }
        if let Some(u) = &upper_bounds {
            if u.len() != n {
                return Err(ModelError::Schema(format!(
                    "u has {} entries but n = {n}",
                    u.len()
                )));
            }
            if let Some((index, &v)) = u.iter().enumerate().find(|(_, &v)| v == 0) {
                return Err(ModelError::UpperBoundTooSmall { index, value: v as f64 });
            }
        }
        for (j, row) in rows.iter().enumerate() {
            row.validate_shape()
                .map_err(|e| ModelError::MalformedRow(format!("row {j}: {e}")))?;
            if let Some(&(i, _)) = row.entries.iter().find(|&&(i, _)| i >= n) {
                return Err(ModelError::MalformedRow(format!(
                    "row {j} references x{i} but n = {n}"
                )));
            }
        }
        Ok(Instance { n, costs, upper_bounds, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn upper_bounds(&self) -> Option<&[u64]> {
        self.upper_bounds.as_deref()
    }

    /// Rows as stored (raw right-hand sides).
    pub fn rows(&self) -> &[ConstraintRow] {
        &self.rows
    }

    /// Rows in arrival order, normalized to unit right-hand side.
    pub fn normalized_rows(&self) -> impl Iterator<Item = ConstraintRow> + '_ {
        self.rows
            .iter()
            .map(|r| normalize_row(r).expect("rows are validated on construction"))
    }

    /// True row sparsity `k` (largest support).
    pub fn row_sparsity(&self) -> usize {
        self.rows.iter().map(|r| r.support_size()).max().unwrap_or(0)
    }

    /// True column sparsity `l` (most rows sharing a variable).
    pub fn column_sparsity(&self) -> usize {
        let mut counts = vec![0usize; self.n];
        for row in &self.rows {
            for i in row.indices() {
                counts[i] += 1;
            }
        }
        counts.into_iter().max().unwrap_or(0)
    }

    pub fn cost_of(&self, x: &[f64]) -> f64 {
        self.costs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// The first `m` rows as a standalone instance.
    pub fn prefix(&self, m: usize) -> Instance {
        Instance {
            n: self.n,
            costs: self.costs.clone(),
            upper_bounds: self.upper_bounds.clone(),
            rows: self.rows[..m.min(self.rows.len())].to_vec(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RowDoc {
    entries: Vec<(usize, f64)>,
    rhs: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    n: usize,
    c: Vec<f64>,
    u: Option<Vec<serde_json::Number>>,
    rows: Vec<RowDoc>,
}

/// Parses and validates an instance document.
pub fn load_instance(bytes: &[u8]) -> Result<Instance, ModelError> {
    let doc: InstanceDoc =
        serde_json::from_slice(bytes).map_err(|e| ModelError::Schema(e.to_string()))?;
    if doc.c.len() != doc.n {
        return Err(ModelError::Schema(format!(
            "c has {} entries but n = {}",
            doc.c.len(),
            doc.n
        )));
    }
    let upper = match doc.u {
        None => None,
        Some(raw) => {
            let mut u = Vec::with_capacity(raw.len());
            for (index, num) in raw.iter().enumerate() {
                let value = num.as_f64().unwrap_or(f64::NAN);
                match num.as_u64() {
                    Some(v) if v >= 1 => u.push(v),
                    Some(v) => {
                        return Err(ModelError::UpperBoundTooSmall { index, value: v as f64 })
                    }
                    None if value.fract() != 0.0 || !value.is_finite() => {
                        return Err(ModelError::NonIntegralUpperBound { index, value })
                    }
                    None if value >= 1.0 && value <= u64::MAX as f64 => u.push(value as u64),
                    None => return Err(ModelError::UpperBoundTooSmall { index, value }),
                }
            }
            Some(u)
        }
    };
    let rows = doc
        .rows
        .into_iter()
        .map(|r| ConstraintRow { entries: r.entries, rhs: r.rhs })
        .collect();
    Instance::new(doc.c, upper, rows)
}

/// Serializes an instance as a pretty-printed document.
pub fn save_instance(instance: &Instance) -> Vec<u8> {
    let doc = InstanceDoc {
        n: instance.n,
        c: instance.costs.clone(),
        u: instance
            .upper_bounds
            .as_ref()
            .map(|u| u.iter().map(|&v| serde_json::Number::from(v)).collect()),
        rows: instance
            .rows
            .iter()
            .map(|r| RowDoc { entries: r.entries.clone(), rhs: r.rhs })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("instance serializes");
    out.push(b'\n');
    out
}

/// Online estimates of the row sparsity `k` and column sparsity `l`.
///
/// `k_est` starts at 2 and doubles whenever a wider row shows up, so `log2 k_est`
/// is always a positive integer.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityTracker {
    k_est: u64,
    col_counts: Vec<u32>,
    ell_est: u32,
}

impl Default for SparsityTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl SparsityTracker {
    pub fn new() -> Self {
        SparsityTracker { k_est: 2, col_counts: Vec::new(), ell_est: 0 }
    }

    pub fn observe_row(&mut self, row: &ConstraintRow) {
        while (self.k_est as usize) < row.support_size() {
            self.k_est *= 2;
        }
        for i in row.indices() {
            if i >= self.col_counts.len() {
                self.col_counts.resize(i + 1, 0);
            }
            self.col_counts[i] += 1;
            self.ell_est = self.ell_est.max(self.col_counts[i]);
        }
    }

    pub fn k_est(&self) -> u64 {
        self.k_est
    }

    pub fn log2_k(&self) -> u32 {
        self.k_est.trailing_zeros()
    }

    pub fn ell_est(&self) -> u32 {
        self.ell_est
    }

    pub fn col_count(&self, var: usize) -> u32 {
        self.col_counts.get(var).copied().unwrap_or(0)
    }
}
