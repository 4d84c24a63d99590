mod common;

use common::{box_suite, covers, kc_holds};
use online_covering::box_kc::{column_sparsity_tau, max_delta, BoxError, BoxState, Tau};
use online_covering::ConstraintRow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest step in (0, 1] keeping every coordinate at or below `tau * u`,
/// found by bisection on the damped update itself.
fn bisect_delta(x: &[f64], support: &[(usize, f64)], c: &[f64], u: &[u64], d_m: f64, tau: f64, k: f64) -> f64 {
    let fits = |d: f64| {
        support.iter().all(|&(i, a)| {
            let r = d * d_m * a / c[i];
            x[i] + r * x[i] + r / (k * a) <= tau * u[i] as f64
        })
    };
    if fits(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn single_variable_freezes_after_quarter_step() {
    let mut s = BoxState::new(vec![1.0], vec![1]);
    let ev = s.arrive_box(&ConstraintRow::unit(vec![(0, 1.0)]), Tau::default()).unwrap();
    assert_eq!(ev.constraints.len(), 1);
    let c = &ev.constraints[0];
    assert_eq!(c.t, 0.25);
    assert_eq!(c.frozen, vec![0]);
    assert_eq!(s.x(), &[0.125]);
    assert_eq!(s.frozen(), &[true]);
    assert_eq!(s.bar_x(), vec![1.0]);
    assert!(ev.all_passed());
}

#[test]
fn max_delta_matches_bisection() {
    assert_eq!(max_delta(&[0.0], &[(0, 1.0)], &[1.0], &[1], 1.0, 0.25, 2), 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let n = rng.gen_range(1..=5);
        let tau = rng.gen_range(0.05..0.45);
        let u: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let x: Vec<f64> = u.iter().map(|&v| rng.gen_range(0.0..tau * v as f64 * 0.9)).collect();
        let support: Vec<(usize, f64)> = (0..n).map(|i| (i, rng.gen_range(0.05..=1.0))).collect();
        let d_m = support.iter().map(|&(i, a)| c[i] / a).fold(f64::INFINITY, f64::min);
        let k = 1u64 << rng.gen_range(1..=3);
        let got = max_delta(&x, &support, &c, &u, d_m, tau, k);
        let want = bisect_delta(&x, &support, &c, &u, d_m, tau, k as f64);
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}

#[test]
fn two_variables_only_the_tight_one_freezes() {
    let mut s = BoxState::new(vec![1.0, 1.0], vec![1, 4]);
    let ev = s.arrive_box(&ConstraintRow::unit(vec![(0, 1.0), (1, 1.0)]), Tau::default()).unwrap();
    assert_eq!(ev.constraints[0].t, 0.25);
    assert_eq!(s.frozen(), &[true, false]);
    assert_eq!(s.x(), &[0.125, 0.125]);
    assert_eq!(s.bar_x(), vec![1.0, 0.125]);
    assert!(ev.all_passed());
}

#[test]
fn infeasible_row_is_reported() {
    let mut s = BoxState::new(vec![1.0, 1.0], vec![1, 1]);
    let err = s.arrive_box(&ConstraintRow::unit(vec![(0, 0.3), (1, 0.3)]), Tau::default()).unwrap_err();
    assert_eq!(err, BoxError::Infeasible { row: 0 });
}

#[test]
fn threshold_outside_range_is_rejected() {
    for bad in [0.0, 0.5, 0.7, -0.1] {
        let mut s = BoxState::new(vec![1.0], vec![1]);
        let r = s.arrive_box(&ConstraintRow::unit(vec![(0, 1.0)]), Tau::Fixed(bad));
        assert!(matches!(r, Err(BoxError::BadThreshold(_))));
    }
}

#[test]
fn column_sparsity_threshold() {
    assert_eq!(column_sparsity_tau(0), 0.125);
    assert_eq!(column_sparsity_tau(2), 0.125);
    assert_eq!(column_sparsity_tau(4), 1.0 / 16.0);
}

#[test]
fn random_suite_invariants() {
    for tau in [Tau::default(), Tau::ColumnSparsity, Tau::Fixed(0.4)] {
        for inst in box_suite(40) {
            let u = inst.upper_bounds().unwrap().to_vec();
            let mut s = BoxState::new(inst.costs().to_vec(), u.clone());
            for (j, row) in inst.rows().iter().enumerate() {
                let ev = match s.arrive_box(row, tau) {
                    Ok(ev) => ev,
                    Err(BoxError::Infeasible { row }) => {
                        assert_eq!(row, j);
                        break;
                    }
                    Err(e) => panic!("{e}"),
                };
                assert!(ev.all_passed(), "{:?}", ev.checks().iter().filter(|c| !c.passed).collect::<Vec<_>>());
                let xbar = s.bar_x();
                for seen in &inst.rows()[..=j] {
                    assert!(covers(seen, &xbar));
                }
                for (i, &f) in s.frozen().iter().enumerate() {
                    assert_eq!(f, s.x()[i] >= ev.tau * u[i] as f64 * (1.0 - 1e-12));
                    assert!(xbar[i] <= u[i] as f64);
                }
                let norm = common::normalized(row);
                assert!(kc_holds(&norm, s.x(), s.frozen(), &u));
            }
            assert!(s.check_invariants().all_passed());
        }
    }
}
