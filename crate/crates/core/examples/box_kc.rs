//! Fractional solver with upper bounds: shows how variables freeze at
//! `tau * u_i` and how the reported solution rounds them up to `u_i`.

use online_covering::box_kc::{BoxState, Tau};
use online_covering::ConstraintRow;

fn main() {
    let costs = vec![1.0, 2.0, 0.5, 3.0];
    let upper = vec![1, 3, 2, 1];
    let rows = [
        ConstraintRow::unit(vec![(0, 1.0), (1, 0.5)]),
        ConstraintRow::unit(vec![(1, 0.4), (2, 0.3)]),
        ConstraintRow::new(vec![(0, 2.0), (2, 1.0), (3, 1.0)], 3.0),
        ConstraintRow::unit(vec![(2, 0.2), (3, 1.0)]),
    ];

    let mut s = BoxState::new(costs, upper);
    for (j, row) in rows.iter().enumerate() {
        let ev = s.arrive_box(row, Tau::default()).expect("row is coverable");
        println!("row {j}: {} residual constraint(s), kc witness ok = {}", ev.constraints.len(), ev.kc.passed);
        for c in &ev.constraints {
            println!("    b = {:.3}  t = {:.4}  froze {:?}", c.residual_b, c.t, c.frozen);
        }
        println!("    x    = {:.4?}", s.x());
        println!("    xbar = {:.4?}", s.bar_x());
    }
    println!("primal {:.4}, dual {:.4}", s.primal_cost(), s.dual_total());
    println!("invariants hold: {}", s.check_invariants().all_passed());
}
