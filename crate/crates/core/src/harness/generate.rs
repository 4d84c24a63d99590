use crate::model::{ConstraintRow, Instance};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;

/// Parameters of [`gen_random`].
///
/// Row supports are drawn from the first `max(k_max, ceil(density * n))`
/// variables, so `density < 1` concentrates rows on fewer columns and raises
/// the column sparsity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub k_max: usize,
    pub coeff_range: (f64, f64),
    pub u_max: Option<u64>,
    #[serde(default = "full_density")]
    pub density: f64,
    #[serde(default)]
    pub seed: u64,
}

fn full_density() -> f64 {
    1.0
}

impl GenParams {
    pub fn clp(n: usize, m: usize, k_max: usize, seed: u64) -> Self {
        GenParams { n, m, k_max, coeff_range: (0.1, 2.0), u_max: None, density: 1.0, seed }
    }

    pub fn cip(n: usize, m: usize, k_max: usize, u_max: u64, seed: u64) -> Self {
        GenParams { u_max: Some(u_max), ..Self::clp(n, m, k_max, seed) }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::Params(msg.to_string()));
        let (lo, hi) = self.coeff_range;
        if self.n == 0 || self.m == 0 {
            return bad("n and m must be at least 1");
        }
        if self.k_max == 0 {
            return bad("k_max must be at least 1");
        }
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad("coeff_range must satisfy 0 < lo <= hi < inf");
        }
        if self.u_max == Some(0) {
            return bad("u_max must be at least 1");
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad("density must lie in (0, 1]");
        }
        Ok(())
    }
}

const MAX_RESAMPLES: usize = 10_000;

/// Seeded random covering instance; with `u_max` every row is integrally
/// coverable.
pub fn gen_random(p: &GenParams) -> Result<Instance, HarnessError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let pool = p.k_max.max((p.density * p.n as f64).ceil() as usize).min(p.n);
    let k_max = p.k_max.min(pool);
    let costs: Vec<f64> = (0..p.n).map(|_| rng.gen_range(0.5..=2.0)).collect();
    let upper: Option<Vec<u64>> = p.u_max.map(|u| (0..p.n).map(|_| rng.gen_range(1..=u)).collect());
    let (lo, hi) = p.coeff_range;

    let mut rows = Vec::with_capacity(p.m);
    for j in 0..p.m {
        let mut attempts = 0;
        let row = loop {
            let k = rng.gen_range(1..=k_max);
            let mut idx = sample(&mut rng, pool, k).into_vec();
            idx.sort_unstable();
            let entries: Vec<(usize, f64)> = idx.into_iter().map(|i| (i, rng.gen_range(lo..=hi))).collect();
            let row = ConstraintRow::unit(entries);
            let coverable = match &upper {
                None => true,
                Some(u) => row.entries.iter().map(|&(i, a)| a * u[i] as f64).sum::<f64>() >= 1.0,
            };
            if coverable {
                break row;
            }
            attempts += 1;
            if attempts == MAX_RESAMPLES {
                return Err(HarnessError::Params(format!("row {j}: no coverable row after {MAX_RESAMPLES} draws")));
            }
        };
        rows.push(row);
    }
    Ok(Instance::new(costs, upper, rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::save_instance;

    #[test]
    fn deterministic_per_seed() {
        let p = GenParams::cip(8, 10, 3, 3, 42);
        assert_eq!(save_instance(&gen_random(&p).unwrap()), save_instance(&gen_random(&p).unwrap()));
        let q = GenParams { seed: 43, ..p.clone() };
        assert_ne!(save_instance(&gen_random(&p).unwrap()), save_instance(&gen_random(&q).unwrap()));
    }

    #[test]
    fn k_max_one_gives_singletons() {
        let inst = gen_random(&GenParams::clp(6, 15, 1, 1)).unwrap();
        assert!(inst.rows().iter().all(|r| r.support_size() == 1));
        assert!(inst.upper_bounds().is_none());
    }

    #[test]
    fn density_limits_the_pool() {
        let p = GenParams { density: 0.25, ..GenParams::clp(20, 30, 2, 9) };
        let inst = gen_random(&p).unwrap();
        assert!(inst.rows().iter().flat_map(|r| r.indices()).all(|i| i < 5));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(gen_random(&GenParams::clp(0, 1, 1, 0)).is_err());
        assert!(gen_random(&GenParams { coeff_range: (0.0, 1.0), ..GenParams::clp(2, 1, 1, 0) }).is_err());
    }
}
