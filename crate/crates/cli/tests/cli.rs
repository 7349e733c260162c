//! End-to-end tests of the `divlab` binary: exit codes, report shapes,
//! seed determinism, and bit-exact document round trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn workdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("divlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_file(name: &str, text: &str) -> PathBuf {
    let path = workdir().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn divlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divlab")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn count3_table() -> String {
    // δ(A) = |A| − 1 on {a,b,c}: valid but far from the cut cone.
    serde_json::json!({
        "ground": ["a", "b", "c"],
        "diversity": [
            {"subset": ["a", "b"], "value": 1.0},
            {"subset": ["a", "c"], "value": 1.0},
            {"subset": ["b", "c"], "value": 1.0},
            {"subset": ["a", "b", "c"], "value": 2.0}
        ]
    })
    .to_string()
}

#[test]
fn validate_accepts_a_valid_table() {
    let path = write_file("valid.json", &count3_table());
    let out = divlab(&["validate", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["ok"], true);
}

#[test]
fn validate_flags_violations_with_witness() {
    let doc = serde_json::json!({
        "ground": ["a", "b", "c"],
        "diversity": [
            {"subset": ["a", "b"], "value": 2.0},
            {"subset": ["a", "c"], "value": 1.0},
            {"subset": ["b", "c"], "value": 1.0},
            {"subset": ["a", "b", "c"], "value": 1.0}
        ]
    });
    let path = write_file("invalid.json", &doc.to_string());
    let out = divlab(&["validate", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["ok"], false);
    let text = v["violations"].to_string();
    assert!(text.contains("monotonicity"), "report: {text}");
}

#[test]
fn malformed_documents_exit_two() {
    let path = write_file("broken.json", "{ not json");
    let out = divlab(&["validate", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown fields are rejected too.
    let path2 = write_file("extra.json", r#"{"ground": ["a","b"], "bogus": 1}"#);
    let out2 = divlab(&["validate", "--in", path2.to_str().unwrap()]);
    assert_eq!(out2.status.code(), Some(2));

    // A field the command does not use is an error as well.
    let doc = serde_json::json!({
        "ground": ["a", "b"],
        "diversity": [{"subset": ["a", "b"], "value": 1.0}],
        "metric": [0.0, 1.0, 1.0, 0.0]
    });
    let path3 = write_file("toomuch.json", &doc.to_string());
    let out3 = divlab(&["validate", "--in", path3.to_str().unwrap()]);
    assert_eq!(out3.status.code(), Some(2));

    // Missing table entries are structural, not axiom violations.
    let doc4 = serde_json::json!({
        "ground": ["a", "b", "c"],
        "diversity": [{"subset": ["a", "b"], "value": 1.0}]
    });
    let path4 = write_file("partial.json", &doc4.to_string());
    let out4 = divlab(&["validate", "--in", path4.to_str().unwrap()]);
    assert_eq!(out4.status.code(), Some(2));
}

#[test]
fn build_hsteiner_table() {
    let doc = serde_json::json!({
        "ground": ["a", "b", "c", "d"],
        "hypergraph": {"edges": [
            {"members": ["a", "b", "c"], "weight": 1.0},
            {"members": ["c", "d"], "weight": 1.0}
        ]}
    });
    let path = write_file("hg.json", &doc.to_string());
    let out = divlab(&["build", "--mode", "hsteiner", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let entries = v["diversity"].as_array().unwrap();
    let find = |labels: &[&str]| -> f64 {
        entries
            .iter()
            .find(|e| {
                let s: Vec<&str> =
                    e["subset"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
                s == labels
            })
            .unwrap()["value"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(find(&["a", "d"]), 2.0);
    assert_eq!(find(&["a", "b"]), 1.0);
    assert_eq!(entries.len(), 16); // the emitted table is total
}

#[test]
fn build_cut_table_and_validate_round_trip() {
    let doc = serde_json::json!({
        "ground": ["a", "b", "c"],
        "cut": ["a"]
    });
    let path = write_file("cutdoc.json", &doc.to_string());
    let table_path = workdir().join("cut_table.json");
    let out = divlab(&[
        "build",
        "--mode",
        "cut",
        "--in",
        path.to_str().unwrap(),
        "--out",
        table_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out2 = divlab(&["validate", "--in", table_path.to_str().unwrap()]);
    assert_eq!(out2.status.code(), Some(0));
}

#[test]
fn build_meanwidth_is_reproducible_from_seed() {
    let doc = serde_json::json!({
        "ground": ["p", "q"],
        "points": {"dim": 2, "coords": [[0.125, -0.375], [2.0625, 1.5]]},
        "samples": 20000
    });
    let path = write_file("mw.json", &doc.to_string());
    let a = divlab(&["build", "--mode", "meanwidth", "--in", path.to_str().unwrap(), "--seed", "9"]);
    let b = divlab(&["build", "--mode", "meanwidth", "--in", path.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn document_round_trip_is_bitwise() {
    // Awkward floats must survive emit → parse → emit unchanged.
    let doc = serde_json::json!({
        "ground": ["a", "b", "c"],
        "hypergraph": {"edges": [
            {"members": ["a", "b"], "weight": 0.1},
            {"members": ["b", "c"], "weight": 1.0 / 3.0},
            {"members": ["a", "c"], "weight": 0.30000000000000004}
        ]}
    });
    let path = write_file("rt_in.json", &doc.to_string());
    let t1 = workdir().join("rt1.json");
    let out = divlab(&[
        "build", "--mode", "steiner",
        "--in", path.to_str().unwrap(),
        "--out", t1.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let first = std::fs::read_to_string(&t1).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&first).unwrap();
    let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
    assert_eq!(first, again);
    let values: Vec<f64> = parsed["diversity"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"].as_f64().unwrap())
        .collect();
    assert!(values.contains(&0.1));
    assert!(values.contains(&(0.1 + 0.30000000000000004))); // full-set tree

}

#[test]
fn embed_reports_distortion_and_duals() {
    let path = write_file("embed.json", &count3_table());
    let out = divlab(&["embed", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let k = v["distortion"].as_f64().unwrap();
    assert!((k - 4.0 / 3.0).abs() < 1e-6);
    assert!(!v["witness_splits"].as_array().unwrap().is_empty());
    assert_eq!(v["embedding"]["dim"].as_u64().unwrap(), 2);
}

#[test]
fn embed_zero_diversity_is_flat() {
    let doc = serde_json::json!({
        "ground": ["a", "b"],
        "diversity": [{"subset": ["a", "b"], "value": 0.0}]
    });
    let path = write_file("zero.json", &doc.to_string());
    let out = divlab(&["embed", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["distortion"].as_f64().unwrap(), 1.0);
    assert!(v["witness_splits"].as_array().unwrap().is_empty());
}

fn triangle_instance() -> String {
    serde_json::json!({
        "ground": ["a", "b", "c"],
        "capacities": [
            {"subset": ["a", "b"], "value": 1.0},
            {"subset": ["a", "c"], "value": 1.0},
            {"subset": ["b", "c"], "value": 1.0}
        ],
        "demands": [{"subset": ["a", "b", "c"], "value": 1.0}]
    })
    .to_string()
}

#[test]
fn flowcut_gamma_on_triangle_and_path() {
    let path = write_file("tri.json", &triangle_instance());
    let out = divlab(&["flowcut", "--mode", "gamma", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!((v["gap"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-6);
    assert!((v["packing_value"].as_f64().unwrap() - 1.5).abs() < 1e-6);
    assert!((v["cut_value"].as_f64().unwrap() - 2.0).abs() < 1e-6);

    let pathdoc = serde_json::json!({
        "ground": ["a", "b", "c"],
        "capacities": [
            {"subset": ["a", "b"], "value": 1.0},
            {"subset": ["b", "c"], "value": 1.0}
        ],
        "demands": [{"subset": ["a", "c"], "value": 1.0}]
    });
    let p2 = write_file("pathinst.json", &pathdoc.to_string());
    let out2 = divlab(&["flowcut", "--mode", "gamma", "--in", p2.to_str().unwrap()]);
    let v2 = stdout_json(&out2);
    assert!((v2["gap"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn flowcut_verify_and_tight_on_triangle() {
    let path = write_file("tri2.json", &triangle_instance());
    let out = divlab(&["flowcut", "--mode", "verify", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["holds"], true);

    let topo = serde_json::json!({
        "ground": ["a", "b", "c"],
        "hypergraph": {"edges": [
            {"members": ["a", "b"], "weight": 1.0},
            {"members": ["a", "c"], "weight": 1.0},
            {"members": ["b", "c"], "weight": 1.0}
        ]}
    });
    let p2 = write_file("topo.json", &topo.to_string());
    let out2 = divlab(&["flowcut", "--mode", "tight", "--in", p2.to_str().unwrap()]);
    assert_eq!(out2.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out2.stderr));
    let v2 = stdout_json(&out2);
    let k = v2["distortion"].as_f64().unwrap();
    let gap = v2["gap"].as_f64().unwrap();
    assert!((k - 4.0 / 3.0).abs() < 1e-6);
    assert!((gap - k).abs() < 1e-5);
}

#[test]
fn flowcut_mincut_reports_all_cuts() {
    let path = write_file("tri3.json", &triangle_instance());
    let out = divlab(&["flowcut", "--mode", "mincut", "--in", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["cuts"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_suite_runs_clean_and_zero_count_is_empty() {
    let out = divlab(&["verify", "--seed", "3", "--n", "4", "--count", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(v["failures"].as_array().unwrap().is_empty());
    assert!(v["cases"].as_u64().unwrap() > 0);

    let out0 = divlab(&["verify", "--count", "0"]);
    assert_eq!(out0.status.code(), Some(0));
    assert_eq!(stdout_json(&out0)["cases"].as_u64().unwrap(), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(divlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(divlab(&["embed"]).status.code(), Some(2)); // missing --in
    assert_eq!(divlab(&["build", "--mode", "nope", "--in", "/dev/null"]).status.code(), Some(2));
}
