//! Runs the fractional solver once and rounds it with several seeds,
//! reporting the realized integral cost and any alterations.

use online_covering::box_kc::Tau;
use online_covering::harness::{gen_random, run_fractional, run_rounding, GenParams, RunOptions};
use online_covering::oracles::{ip_opt, CoveringProgram};

fn main() {
    let tau: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.4);
    let p = GenParams { coeff_range: (0.3, 1.0), ..GenParams::cip(10, 30, 10, 3, 1) };
    let inst = gen_random(&p).expect("valid parameters");
    let frac = run_fractional(&inst, &RunOptions { tau: Tau::Fixed(tau), ..RunOptions::full() }).unwrap();
    let ip = ip_opt(&CoveringProgram::from(&inst));

    println!("tau = {tau}, fractional cost {:.3}, IP optimum {:.3}", frac.state.primal_cost(), ip.value);
    for seed in 0..10 {
        let run = run_rounding(&inst, &frac, seed, true).unwrap();
        let (z, alt) = run.state.cost_decomposition();
        let rows: Vec<usize> = run.state.alterations().iter().map(|a| a.row).collect();
        println!(
            "seed {seed}: X cost {:>6.3}  Z cost {:>6.3}  alterations {:>6.3} at rows {rows:?}",
            run.state.cost(),
            z,
            alt
        );
    }
}
