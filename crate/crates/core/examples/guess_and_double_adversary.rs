//! Plays the adaptive adversary against the reference guess-and-double
//! algorithm and prints each phase.
//!
//! Usage: `cargo run --release --example guess_and_double_adversary -- [rho] [greediness] [phases]`

use online_covering::adversary::{run_adversary, validate_claims, ReferenceGd};

fn main() {
    let mut args = std::env::args().skip(1);
    let rho: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let g: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let phases: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    let mut algo = ReferenceGd::new(g).expect("greediness in (0, 1]");
    let trace = run_adversary(&mut algo, rho, phases).expect("reference respects the framework");
    println!("rho = {rho}, greediness = {g}, seed bound = {}", trace.seed.bound);
    for p in &trace.phases {
        println!(
            "phase {}: alpha {:.3e}  vars {}  constraints {}  primal {:.3e}  dual {:.3e}  h {:?}",
            p.phase, p.alpha, p.variables, p.constraints, p.primal, p.dual, p.h_counts
        );
    }
    let claims = validate_claims(&trace);
    for c in &claims.report.checks {
        println!("{c}");
    }
    println!("primal / dual = {:.3}", claims.gap());
}
