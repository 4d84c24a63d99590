mod common;

use common::{box_suite, clp_suite, normalized};
use online_covering::oracles::{
    dual_feasibility_factor, ip_opt, ip_opt_exhaustive, knapsack_opt, lp_opt, CoveringProgram, OracleStatus,
};
use online_covering::ConstraintRow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two-variable LP optimum by vertex enumeration over every pair of tight
/// lines (rows, axes, upper bounds).
fn lp_2d(c: [f64; 2], u: Option<[f64; 2]>, rows: &[ConstraintRow]) -> Option<f64> {
    let mut lines: Vec<([f64; 2], f64)> = vec![([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0)];
    if let Some(u) = u {
        lines.push(([1.0, 0.0], u[0]));
        lines.push(([0.0, 1.0], u[1]));
    }
    for r in rows {
        let r = normalized(r);
        let mut a = [0.0; 2];
        for &(i, v) in &r.entries {
            a[i] += v;
        }
        lines.push((a, 1.0));
    }
    let feasible = |x: [f64; 2]| {
        x.iter().all(|&v| v >= -1e-9)
            && u.is_none_or(|u| x[0] <= u[0] + 1e-9 && x[1] <= u[1] + 1e-9)
            && rows.iter().all(|r| normalized(r).lhs(&x) >= 1.0 - 1e-9)
    };
    let mut best: Option<f64> = None;
    for p in 0..lines.len() {
        for q in p + 1..lines.len() {
            let ((a, b), (d, e)) = (lines[p], lines[q]);
            let det = a[0] * d[1] - a[1] * d[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = [(b * d[1] - a[1] * e) / det, (a[0] * e - b * d[0]) / det];
            if feasible(x) {
                let v = c[0] * x[0] + c[1] * x[1];
                best = Some(best.map_or(v, |w: f64| w.min(v)));
            }
        }
    }
    best
}

#[test]
fn lp_matches_vertex_enumeration_in_two_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..300 {
        let c = [rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0)];
        let u = rng.gen_bool(0.5).then(|| [rng.gen_range(1..=3) as f64, rng.gen_range(1..=3) as f64]);
        let rows: Vec<ConstraintRow> = (0..rng.gen_range(1..=5))
            .map(|_| {
                let mut e = Vec::new();
                if rng.gen_bool(0.8) {
                    e.push((0, rng.gen_range(0.1..2.0)));
                }
                if e.is_empty() || rng.gen_bool(0.8) {
                    e.push((1, rng.gen_range(0.1..2.0)));
                }
                ConstraintRow::unit(e)
            })
            .collect();
        let prog = CoveringProgram::new(c.to_vec(), u.map(|u| u.iter().map(|&v| v as u64).collect()), rows.clone());
        let r = lp_opt(&prog);
        match lp_2d(c, u, &rows) {
            Some(want) => {
                assert_eq!(r.status, OracleStatus::Optimal);
                assert!((r.value - want).abs() <= 1e-7 * want.max(1.0), "{} vs {want}", r.value);
                assert!(prog.is_feasible(&r.argument, 1e-9));
            }
            None => assert_eq!(r.status, OracleStatus::Infeasible),
        }
    }
}

#[test]
fn ip_search_agrees_with_exhaustive_enumeration() {
    let mut compared = 0;
    for inst in box_suite(120) {
        let u = inst.upper_bounds().unwrap();
        if u.iter().map(|&v| v + 1).product::<u64>() > 10_000 {
            continue;
        }
        let prog = CoveringProgram::from(&inst);
        let fast = ip_opt(&prog);
        let slow = ip_opt_exhaustive(&prog);
        assert_eq!(fast.status, slow.status);
        if slow.is_optimal() {
            assert!((fast.value - slow.value).abs() <= 1e-9 * slow.value);
            assert!(prog.is_feasible(&fast.argument, 1e-12));
            let lp = lp_opt(&prog);
            assert!(lp.value <= fast.value * (1.0 + 1e-9));
        }
        compared += 1;
    }
    assert!(compared >= 30, "only {compared} lattices small enough");
}

#[test]
fn integrality_gap_family() {
    // min x1 s.t. x1 + (1 - eps) x2 >= 1, x2 <= 1, with x2 free of cost
    for eps in [0.5, 0.1, 0.01, 0.001] {
        let prog = CoveringProgram::new(
            vec![1.0, 0.0],
            Some(vec![10, 1]),
            vec![ConstraintRow::unit(vec![(0, 1.0), (1, 1.0 - eps)])],
        );
        let lp = lp_opt(&prog);
        let ip = ip_opt(&prog);
        assert!((lp.value - eps).abs() < 1e-12);
        assert_eq!(ip.value, 1.0);
        assert!((ip.value / lp.value - 1.0 / eps).abs() < 1e-6 / eps);
    }
}

#[test]
fn knapsack_oracle_matches_brute_force() {
    for seed in 0..200 {
        let (c, a, u) = common::knapsack_instance(70_000 + seed, 50_000);
        let r = knapsack_opt(&c, &a, &u);
        let want = common::brute_knapsack(&c, &a, &u).unwrap();
        assert!(r.is_optimal());
        assert!((r.value - want).abs() <= 1e-9 * want);
    }
}

#[test]
fn unbounded_ip_uses_a_finite_box() {
    let prog = CoveringProgram::new(vec![1.0, 3.0], None, vec![ConstraintRow::unit(vec![(0, 0.3), (1, 1.0)])]);
    let r = ip_opt(&prog);
    assert!(r.is_optimal());
    assert_eq!(r.value, 3.0);
}

#[test]
fn dual_factor_of_a_scaled_solution() {
    for inst in clp_suite(20) {
        let terms: Vec<(Vec<(usize, f64)>, f64)> =
            inst.normalized_rows().map(|r| (r.entries.clone(), 0.5)).collect();
        let factor = dual_feasibility_factor(terms.iter().map(|(s, y)| (s.as_slice(), *y)), inst.costs());
        let mut want: f64 = 0.0;
        for (i, c) in inst.costs().iter().enumerate() {
            let load: f64 = terms.iter().flat_map(|(s, y)| s.iter().filter(|e| e.0 == i).map(move |e| e.1 * y)).sum();
            want = want.max(load / c);
        }
        assert!((factor - want).abs() <= 1e-12 * want.max(1.0));
    }
}
