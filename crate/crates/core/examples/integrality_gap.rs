//! The instance `min x1 s.t. x1 + (1 - eps) x2 >= 1, x2 <= 1` with `x2` free:
//! the LP pays `eps`, any integral solution pays 1.

use online_covering::oracles::{ip_opt, lp_opt, CoveringProgram};
use online_covering::ConstraintRow;

fn main() {
    println!("eps        LP         IP   gap");
    for eps in [0.5, 0.1, 0.01, 0.001, 1e-4] {
        let prog = CoveringProgram::new(
            vec![1.0, 0.0],
            Some(vec![10, 1]),
            vec![ConstraintRow::unit(vec![(0, 1.0), (1, 1.0 - eps)])],
        );
        let lp = lp_opt(&prog);
        let ip = ip_opt(&prog);
        println!("{eps:<8}  {:<9.5}  {:<4} {:.0}", lp.value, ip.value, ip.value / lp.value);
    }
}
