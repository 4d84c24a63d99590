//! Streams a random covering LP through the fractional solver and prints
//! per-arrival step counts next to the offline LP optimum.

use online_covering::clp::ClpState;
use online_covering::harness::{gen_random, GenParams};
use online_covering::oracles::{lp_opt, CoveringProgram};

fn main() {
    let inst = gen_random(&GenParams::clp(12, 20, 4, 7)).expect("valid parameters");
    let mut solver = ClpState::new(inst.costs().to_vec());

    println!("arrival  t  d_m       primal     dual     decreases");
    for row in inst.rows() {
        let ev = solver.arrive(row).expect("row fits the instance");
        println!(
            "{:>7} {:>2}  {:<8.4}  {:<9.4}  {:<8.4} {}",
            ev.arrival,
            ev.t,
            ev.d_m,
            solver.primal_cost(),
            solver.dual_total(),
            ev.decreases.len()
        );
        assert!(ev.checks.all());
    }

    let lp = lp_opt(&CoveringProgram::from(&inst)).value;
    let log_k = solver.tracker().log2_k();
    println!();
    println!("k_est = {}, LP optimum = {lp:.4}", solver.tracker().k_est());
    println!("online / LP = {:.3} (bound 48 log2 k = {})", solver.primal_cost() / lp, 48 * log_k);
    println!("lemma checks passed: {}", solver.check_lemmas().all_passed());
}
