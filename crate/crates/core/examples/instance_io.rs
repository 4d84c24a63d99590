//! Builds an instance, writes it to a temporary file, reads it back and
//! prints its digest.

use online_covering::harness::instance_digest;
use online_covering::{load_instance, save_instance, ConstraintRow, Instance};

fn main() {
    let inst = Instance::new(
        vec![1.0, 2.5, 0.75],
        Some(vec![2, 1, 4]),
        vec![
            ConstraintRow::unit(vec![(0, 0.5), (2, 0.25)]),
            ConstraintRow::new(vec![(1, 3.0), (2, 1.0)], 2.0),
        ],
    )
    .expect("valid instance");

    let path = std::env::temp_dir().join("online-covering-example.json");
    std::fs::write(&path, save_instance(&inst)).expect("writable temp dir");
    let back = load_instance(&std::fs::read(&path).expect("readable")).expect("valid document");
    assert_eq!(back, inst);

    print!("{}", String::from_utf8(save_instance(&back)).unwrap());
    println!("n = {}, m = {}, k = {}, l = {}", back.n(), back.m(), back.row_sparsity(), back.column_sparsity());
    println!("sha256 = {}", instance_digest(&back));
    for row in back.normalized_rows() {
        println!("normalized: {:?} >= 1", row.entries);
    }

    match load_instance(br#"{"n": 1, "c": [0.0], "rows": []}"#) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}
