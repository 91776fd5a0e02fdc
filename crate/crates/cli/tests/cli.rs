use std::process::{Command, Output};

use cvbell::emit::CSV_COLUMNS;

fn cvbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvbell"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn csv_has_fixed_columns() {
    let o = cvbell(&["sweep", "--preset", "fig-pure", "--set", "stop=0.05"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    let rows: Vec<&str> = lines.collect();
    // two curves of six points each
    assert_eq!(rows.len(), 12);
    assert!(rows[0].starts_with("fig-pure/v=-u,0.0,"));
    assert!(rows[11].starts_with("fig-pure/v=0,0.05,"));
    assert!(rows.iter().all(|r| r.ends_with(",gaussian,0.0")));
}

#[test]
fn json_carries_metadata() {
    let o = cvbell(&["sweep", "--preset", "two-photon", "--set", "density=5", "--format", "json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["meta"]["timestamp"], 1_700_000_000);
    assert_eq!(doc["meta"]["spec"][0]["density"], "5");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["violated"], false);
    assert_eq!(rows[1]["violated"], true);
    assert_eq!(rows[1]["angles"].as_array().unwrap().len(), 4);
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = cvbell(&["sweep", "--preset", "fig-leakage", "--set", "stop=0.1", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 11);
}

#[test]
fn exit_codes() {
    // invalid specs
    for args in [
        vec!["sweep", "--preset", "fig-nothing"],
        vec!["sweep", "--preset", "fig-pcs", "--set", "backend=gaussian"],
        vec!["sweep", "--preset", "fig-pure", "--set", "step=-1"],
        vec!["sweep", "--preset", "fig-pure", "--set", "colour=blue"],
        vec!["sweep"],
        vec!["optimize", "--family", "pcs", "--param", "q=x"],
    ] {
        assert_eq!(cvbell(&args).status.code(), Some(2), "{args:?}");
    }
    // unreadable config and unwritable output
    assert_eq!(cvbell(&["sweep", "--config", "/nonexistent/spec.cfg"]).status.code(), Some(3));
    assert_eq!(
        cvbell(&["sweep", "--preset", "fig-pure", "--set", "stop=0", "--out", "/nonexistent/dir/out.csv"])
            .status
            .code(),
        Some(3)
    );
    // a row that does not fit its cutoff fails only under --strict
    let failing = ["sweep", "--preset", "fig-pure", "--set", "backend=fock", "--set", "cutoff=6",
        "--set", "start=0.9", "--set", "stop=0.9"];
    let lenient = cvbell(&failing);
    assert!(lenient.status.success());
    assert!(stdout(&lenient).contains(",NaN,"));
    let mut strict = failing.to_vec();
    strict.push("--strict");
    assert_eq!(cvbell(&strict).status.code(), Some(4));
}

#[test]
fn optimize_prints_best_angles() {
    let o = cvbell(&["optimize", "--family", "two_photon", "--param", "value=2", "--param", "density=6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let f = doc["report"]["f"].as_f64().unwrap();
    // the best ψ₂ value is (√2 - 1)/4
    assert!((f - (2f64.sqrt() - 1.0) / 4.0).abs() < 1e-6, "{f}");
    assert_eq!(doc["report"]["violated"], true);
    assert!(doc["angles"]["theta1"].is_number());
    assert!(doc["grid_violation"].as_f64().unwrap() <= f + 1e-12);
}
