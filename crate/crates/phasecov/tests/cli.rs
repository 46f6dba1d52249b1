use std::path::Path;
use std::process::{Command, Output};

use phasecov::format::read_csv_table;
use serde_json::Value;

fn phasecov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasecov"))
        .args(args)
        .env_remove("PHASECOV_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn fidelity_reports() {
    let out = phasecov(&["fidelity", "--system", "qubit", "--criterion", "global", "--n", "1", "--m", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["closed_form"], 0.75);
    assert_eq!(v["from_choi"], 0.75);
    assert!(v["oracle"].is_null());

    let v = json(&phasecov(&["fidelity", "--system", "qutrit", "--criterion", "single", "--m", "4"]));
    assert_eq!(v["closed_form"].as_f64().unwrap(), 0.666_666_666_666_667);

    let v = json(&phasecov(&["fidelity", "--system", "qubit", "--n", "2", "--m", "2", "--criterion", "global"]));
    assert_eq!(v["from_choi"], 1.0);
}

#[test]
fn report_schema() {
    let v = json(&phasecov(&["fidelity", "--criterion", "global", "--m", "2", "--oracle", "--restarts", "5"]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["system", "criterion", "n_in", "n_out", "closed_form", "from_choi", "oracle", "checks"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    let checks = &v["checks"];
    for (name, field) in [("trace_preserving", "residual"), ("psd", "min_eig"), ("covariant", "residual")] {
        assert_eq!(checks[name]["pass"], true);
        assert!(checks[name][field].is_number());
    }
    assert!(v["oracle"].is_number());
    assert!(v["closed_form"].is_null());
    assert!(v["notes"][0].as_str().unwrap().contains("not implemented verbatim"));
}

#[test]
fn table_row_counts_and_order() {
    let out = phasecov(&["table", "--system", "qubit", "--criterion", "global", "--n", "1..2", "--m", "1..6"]);
    assert!(out.status.success());
    let rows = read_csv_table(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 11);
    let keys: Vec<(usize, usize)> = rows.iter().map(|r| (r.n, r.m)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("system,criterion,N,M,fidelity,source\n"));

    let out = phasecov(&["table", "--system", "qutrit", "--criterion", "both", "--m", "1..5", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 10);
}

#[test]
fn tables_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = phasecov(&["table", "--n", "1..3", "--m", "1..6", "--output", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let rows = read_csv_table(bytes.as_slice()).unwrap();
    let mut again = Vec::new();
    phasecov::format::write_table(&rows, phasecov::format::TableFormat::Csv, &mut again).unwrap();
    assert_eq!(bytes, again);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let detail = dir.path().join("detail.json");
    let d = detail.to_str().unwrap();

    let out = phasecov(&["verify", "--system", "qubit", "--n", "1..3", "--m", "1..6", "--oracle", "--detail", d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let detail_json: Value = serde_json::from_slice(&std::fs::read(&detail).unwrap()).unwrap();
    assert_eq!(detail_json["failures"], 0);

    let out = phasecov(&["verify", "--n", "1..2", "--m", "1..4", "--inject-fault", "offblock", "--detail", d]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("covariant"));

    let out = phasecov(&["verify", "--n", "3..2", "--m", "1..4", "--detail", d]);
    assert_eq!(out.status.code(), Some(2));
    let out = phasecov(&["verify", "--system", "qutrit", "--n", "2", "--m", "1..4", "--detail", d]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_input_and_io_errors() {
    assert_eq!(phasecov(&["fidelity", "--criterion", "global", "--n", "3", "--m", "2"]).status.code(), Some(2));
    assert_eq!(phasecov(&["fidelity", "--criterion", "local", "--m", "2"]).status.code(), Some(2));
    assert_eq!(phasecov(&["oracle", "--criterion", "global", "--n", "1", "--m", "12"]).status.code(), Some(2));
    let missing = Path::new("/nonexistent-dir/table.csv");
    let out = phasecov(&["table", "--m", "1..3", "--output", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_comes_from_environment() {
    let args = ["oracle", "--criterion", "single", "--n", "1", "--m", "2", "--restarts", "4"];
    let from_env = Command::new(env!("CARGO_BIN_EXE_phasecov"))
        .args(args)
        .env("PHASECOV_SEED", "17")
        .output()
        .unwrap();
    let mut flagged = args.to_vec();
    flagged.extend(["--seed", "17"]);
    let from_flag = phasecov(&flagged);
    assert_eq!(from_env.stdout, from_flag.stdout);
    assert_eq!(json(&from_flag)["seed"], 17);
}

#[test]
fn oracle_with_grid() {
    let v = json(&phasecov(&["oracle", "--system", "qutrit", "--criterion", "global", "--m", "2", "--grid", "200"]));
    assert!((v["best_value"].as_f64().unwrap() - 5.0 / 9.0).abs() < 1e-9);
    assert!((v["grid"]["best_value"].as_f64().unwrap() - 5.0 / 9.0).abs() < 1e-4);
}
