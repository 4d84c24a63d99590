//! Covering knapsack: greedy against exhaustive search on a few instances.

use online_covering::oracles::knapsack_opt;
use online_covering::rounding::greedy_knapsack;

fn main() {
    let cases: [(&[f64], &[f64], &[u64]); 4] = [
        (&[3.0, 1.0], &[1.0, 0.6], &[1, 2]),
        (&[0.99, 1000.0, 10.0], &[0.99, 1.0, 0.01], &[1, 1, 1]),
        (&[1.0, 1.0, 1.0], &[0.4, 0.35, 0.3], &[2, 2, 2]),
        (&[2.0, 5.0, 1.0, 4.0], &[0.3, 0.9, 0.1, 0.5], &[3, 1, 3, 1]),
    ];
    for (c, a, u) in cases {
        let w = greedy_knapsack(c, a, u).expect("coverable");
        let greedy: f64 = c.iter().zip(&w).map(|(x, &y)| x * y as f64).sum();
        let opt = knapsack_opt(c, a, u);
        println!("c={c:?} a={a:?} u={u:?}");
        println!("    greedy {w:?} cost {greedy:.3}, optimum {:.3}, ratio {:.3}", opt.value, greedy / opt.value);
    }
}
