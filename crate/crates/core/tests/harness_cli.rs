mod common;

use online_covering::harness::{
    format_table, gen_random, ratio_sweep, run_cip, run_clp, FamilyConfig, GenParams, RunOptions, RunStatus,
    SweepConfig,
};
use online_covering::{load_instance, save_instance, ConstraintRow, Instance};
use serde_json::Value;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_online-covering");

fn strip_timing(text: &str) -> Vec<Value> {
    text.lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).unwrap();
            if let Some(o) = v.as_object_mut() {
                o.remove("elapsed_ms");
            }
            v
        })
        .collect()
}

#[test]
fn reports_are_deterministic_modulo_timing() {
    let inst = gen_random(&GenParams::cip(8, 12, 3, 3, 5)).unwrap();
    let a = run_cip(&inst, 2, &RunOptions::full()).unwrap().to_jsonl();
    let b = run_cip(&inst, 2, &RunOptions::full()).unwrap().to_jsonl();
    assert_eq!(strip_timing(&a), strip_timing(&b));

    let pure = gen_random(&GenParams::clp(8, 12, 3, 5)).unwrap();
    let a = run_clp(&pure, &RunOptions::full()).unwrap().to_jsonl();
    let b = run_clp(&pure, &RunOptions::full()).unwrap().to_jsonl();
    assert_eq!(strip_timing(&a), strip_timing(&b));
}

#[test]
fn report_layout_and_arrival_indices() {
    let inst = gen_random(&GenParams::cip(8, 12, 3, 3, 6)).unwrap();
    let lines = strip_timing(&run_cip(&inst, 0, &RunOptions::full()).unwrap().to_jsonl());
    assert_eq!(lines[0]["type"], "header");
    assert_eq!(lines[0]["mode"], "cip");
    assert_eq!(lines[0]["m"], 12);
    assert_eq!(lines.last().unwrap()["type"], "summary");
    let arrivals: Vec<u64> = lines
        .iter()
        .filter(|l| l["type"] == "cip_arrival")
        .map(|l| l["arrival"].as_u64().unwrap())
        .collect();
    assert_eq!(arrivals, (0..12).collect::<Vec<u64>>());
}

#[test]
fn generator_is_seeded_and_round_trips() {
    let p = GenParams { density: 0.5, ..GenParams::cip(20, 15, 4, 5, 9) };
    let a = gen_random(&p).unwrap();
    assert_eq!(a, gen_random(&p).unwrap());
    assert_ne!(a, gen_random(&GenParams { seed: 10, ..p.clone() }).unwrap());
    assert!(a.row_sparsity() <= 4);
    let u = a.upper_bounds().unwrap();
    assert!(u.iter().all(|&v| (1..=5).contains(&v)));
    for row in a.rows() {
        let reach: f64 = row.entries.iter().map(|&(i, c)| c * u[i] as f64).sum();
        assert!(reach >= row.rhs);
    }
    assert_eq!(load_instance(&save_instance(&a)).unwrap(), a);
}

#[test]
fn ip_oracle_matches_brute_force_on_run_cip() {
    // gap instance with every cost positive
    let inst = Instance::new(
        vec![1.0, 0.05],
        Some(vec![3, 1]),
        vec![ConstraintRow::unit(vec![(0, 1.0), (1, 0.9)])],
    )
    .unwrap();
    let rep = run_cip(&inst, 0, &RunOptions::full()).unwrap();
    assert_eq!(rep.summary.ip_opt, Some(1.0));
    assert!((rep.summary.lp_opt.unwrap() - (0.05 + 0.1)).abs() < 1e-12);
    assert_eq!(rep.status(), RunStatus::Pass);
    assert!(rep.summary.integral_cost.unwrap() >= 1.0);
}

#[test]
fn sweep_table_has_one_row_per_family() {
    let cfg = SweepConfig {
        families: vec![
            FamilyConfig { name: "clp".into(), params: GenParams::clp(6, 8, 3, 0), instances: 4, rounding_seeds: 2 },
            FamilyConfig { name: "cip".into(), params: GenParams::cip(6, 8, 3, 2, 0), instances: 4, rounding_seeds: 2 },
        ],
    };
    let rows = ratio_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.checks_failed == 0 && r.skipped == 0));
    // a pure covering run can never beat the LP optimum
    assert!(rows[0].fractional_max >= 1.0 - 1e-9);
    assert!(rows[0].integral_max.is_none());
    assert!(rows[1].integral_max.unwrap() >= 1.0 - 1e-9);
    let table = format_table(&rows);
    assert_eq!(table.lines().count(), 3);
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, inst: &Instance) -> String {
    let p = dir.join(name);
    std::fs::write(&p, save_instance(inst)).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let pure = write(dir.path(), "pure.json", &gen_random(&GenParams::clp(6, 8, 3, 1)).unwrap());
    let boxed = write(dir.path(), "box.json", &gen_random(&GenParams::cip(6, 8, 3, 3, 1)).unwrap());
    let bad = write(
        dir.path(),
        "bad.json",
        &Instance::new(vec![1.0], Some(vec![1]), vec![ConstraintRow::unit(vec![(0, 0.5)])]).unwrap(),
    );

    assert_eq!(cli(&["solve-clp", "--instance", &pure, "--check-invariants", "--oracle"]).0, 0);
    let report = dir.path().join("r.jsonl");
    let r = report.to_string_lossy().into_owned();
    assert_eq!(cli(&["solve-cip", "--instance", &boxed, "--seed", "3", "--check-invariants", "--report", &r]).0, 0);
    assert!(std::fs::read_to_string(&report).unwrap().lines().count() >= 10);
    assert_eq!(cli(&["solve-cip", "--instance", &boxed, "--seed", "1", "--tau-column-sparsity"]).0, 0);
    assert_eq!(cli(&["solve-cip", "--instance", &bad, "--seed", "0"]).0, 2);
    assert_eq!(cli(&["oracle", "--instance", &bad, "--mode", "ip"]).0, 2);
    assert_eq!(cli(&["solve-clp", "--instance", &boxed]).0, 3);
    assert_eq!(cli(&["solve-cip", "--instance", &boxed, "--seed", "0", "--tau", "0.7"]).0, 3);
    assert_eq!(cli(&["solve-clp", "--instance", "/nonexistent/file.json"]).0, 3);
    assert_eq!(cli(&["no-such-command"]).0, 3);
    assert_eq!(cli(&["--help"]).0, 0);

    let (code, out, _) = cli(&["oracle", "--instance", &pure, "--mode", "lp"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["status"], "OPTIMAL");

    let gen = dir.path().join("g.json");
    let g = gen.to_string_lossy().into_owned();
    assert_eq!(cli(&["gen-random", "--n", "5", "--m", "4", "--k-max", "2", "--u-max", "2", "--seed", "4", "--out", &g]).0, 0);
    let inst = load_instance(&std::fs::read(&gen).unwrap()).unwrap();
    assert_eq!((inst.n(), inst.m()), (5, 4));

    assert_eq!(cli(&["adversary", "--rho", "4", "--phases", "2", "--greediness", "0.5"]).0, 0);
    assert_eq!(cli(&["adversary", "--rho", "2"]).0, 3);

    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{"families":[{"name":"tiny","n":5,"m":6,"k_max":2,"coeff_range":[0.1,2.0],"u_max":2,"seed":1,"instances":2,"rounding_seeds":1}]}"#,
    )
    .unwrap();
    let (code, out, _) = cli(&["ratio-sweep", "--config", &cfg.to_string_lossy()]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with("tiny\t"));
}
