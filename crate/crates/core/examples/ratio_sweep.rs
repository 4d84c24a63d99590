//! Competitive ratios over the families in `examples/data/sweep.json`
//! (or a config given as the first argument).

use online_covering::harness::{format_table, ratio_sweep, SweepConfig};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/sweep.json").to_string());
    let cfg: SweepConfig = serde_json::from_slice(&std::fs::read(&path).expect("config readable")).expect("config parses");
    let rows = ratio_sweep(&cfg).expect("sweep runs");
    print!("{}", format_table(&rows));
}
