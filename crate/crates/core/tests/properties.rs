mod common;

use common::{brute_knapsack, covers};
use online_covering::box_kc::{BoxError, BoxState, Tau};
use online_covering::clp::ClpState;
use online_covering::harness::{gen_random, run_fractional, run_rounding, GenParams, RunOptions};
use online_covering::rounding::{greedy_knapsack, rho_for};
use online_covering::{load_instance, save_instance};
use proptest::prelude::*;

fn clp_params() -> impl Strategy<Value = GenParams> {
    (2usize..10, 1usize..15, 1usize..5, any::<u64>()).prop_map(|(n, m, k, s)| GenParams::clp(n, m, k.min(n), s))
}

fn cip_params() -> impl Strategy<Value = GenParams> {
    (2usize..8, 1usize..12, 1usize..5, 1u64..4, any::<u64>(), 0.2f64..1.0)
        .prop_map(|(n, m, k, u, s, d)| GenParams { density: d, ..GenParams::cip(n, m, k.min(n), u, s) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_documents_round_trip(p in prop_oneof![clp_params(), cip_params()]) {
        let inst = gen_random(&p).unwrap();
        let bytes = save_instance(&inst);
        let again = load_instance(&bytes).unwrap();
        prop_assert_eq!(&again, &inst);
        prop_assert_eq!(save_instance(&again), bytes);
    }

    #[test]
    fn clp_keeps_every_row_covered(p in clp_params()) {
        let inst = gen_random(&p).unwrap();
        let mut s = ClpState::new(inst.costs().to_vec());
        for (j, row) in inst.rows().iter().enumerate() {
            let before = s.x().to_vec();
            let ev = s.arrive(row).unwrap();
            prop_assert!(ev.checks.all(), "arrival {}: {:?}", j, ev.checks);
            prop_assert!(s.x().iter().zip(&before).all(|(a, b)| a >= b));
            prop_assert!(inst.rows()[..=j].iter().all(|r| covers(r, s.x())));
        }
        prop_assert!(s.check_lemmas().all_passed());
        prop_assert!(s.primal_cost() <= 4.0 * s.dual_total() * (1.0 + 1e-9));
    }

    #[test]
    fn box_solver_invariants(p in cip_params(), column in any::<bool>()) {
        let inst = gen_random(&p).unwrap();
        let tau = if column { Tau::ColumnSparsity } else { Tau::default() };
        let mut s = BoxState::new(inst.costs().to_vec(), inst.upper_bounds().unwrap().to_vec());
        for row in inst.rows() {
            match s.arrive_box(row, tau) {
                Ok(ev) => prop_assert!(ev.all_passed()),
                Err(BoxError::Infeasible { .. }) => break,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
        prop_assert!(s.check_invariants().all_passed());
    }

    #[test]
    fn rounding_is_monotone_and_feasible(p in cip_params(), seed in any::<u64>(), wide in any::<bool>()) {
        let inst = gen_random(&p).unwrap();
        let tau = if wide { Tau::Fixed(0.4) } else { Tau::default() };
        let frac = run_fractional(&inst, &RunOptions { tau, ..RunOptions::full() }).unwrap();
        let run = run_rounding(&inst, &frac, seed, true).unwrap();
        prop_assert!(run.tally.passed());
        let u = inst.upper_bounds().unwrap();
        prop_assert!(run.state.x().iter().zip(u).all(|(x, u)| x <= u));
        let x: Vec<f64> = run.state.x().iter().map(|&v| v as f64).collect();
        for row in &inst.rows()[..frac.snapshots.len()] {
            prop_assert!(covers(row, &x));
        }
    }

    #[test]
    fn greedy_within_twice_optimum(
        items in prop::collection::vec((0.1f64..5.0, 0.05f64..1.0, 1u64..4), 1..8)
    ) {
        let c: Vec<f64> = items.iter().map(|t| t.0).collect();
        let a: Vec<f64> = items.iter().map(|t| t.1).collect();
        let u: Vec<u64> = items.iter().map(|t| t.2).collect();
        let reach: f64 = a.iter().zip(&u).map(|(x, &y)| x * y as f64).sum();
        prop_assume!(reach >= 1.0);
        let w = greedy_knapsack(&c, &a, &u).unwrap();
        let got: f64 = c.iter().zip(&w).map(|(x, &y)| x * y as f64).sum();
        let opt = brute_knapsack(&c, &a, &u).unwrap();
        prop_assert!(got <= 2.0 * opt * (1.0 + 1e-9));
    }

    #[test]
    fn prefix_run_is_a_prefix(p in clp_params(), cut in 0usize..15) {
        // the state after a prefix of the stream does not depend on later rows
        let inst = gen_random(&p).unwrap();
        let cut = cut.min(inst.m());
        let mut full = ClpState::new(inst.costs().to_vec());
        let mut part = ClpState::new(inst.costs().to_vec());
        for row in &inst.rows()[..cut] {
            full.arrive(row).unwrap();
        }
        for row in inst.prefix(cut).rows() {
            part.arrive(row).unwrap();
        }
        prop_assert_eq!(full.x(), part.x());
    }

    #[test]
    fn rho_is_a_pure_function(seed in any::<u64>(), var in 0usize..1_000_000) {
        let r = rho_for(seed, var);
        prop_assert!((0.0..1.0).contains(&r));
        prop_assert_eq!(r, rho_for(seed, var));
    }
}
