use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const SCENES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenes");

fn entsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entsym")).args(args).output().unwrap()
}

fn entsym_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_entsym"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn example(name: &str) -> String {
    format!("{SCENES}/examples/{name}")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn item<'a>(report: &'a Value, kind: &str) -> &'a Value {
    report["items"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["kind"] == kind)
        .unwrap_or_else(|| panic!("no {kind} item"))
}

fn check_value(item: &Value, name: &str) -> f64 {
    item["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["value"]
        .as_f64()
        .unwrap()
}

fn value(item: &Value, name: &str) -> f64 {
    item["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no value {name}"))["value"]
        .as_f64()
        .unwrap()
}

fn entropy_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

#[test]
fn matrix_algebra_scene_passes() {
    let out = entsym(&["check", &example("matrix-algebra.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS  algebra M2"));
    assert!(text.ends_with("PASS: 1 items, 0 failed\n"));
}

#[test]
fn non_stochastic_channel_fails_with_residual() {
    let out = entsym(&["check", &example("non-stochastic.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["passed"], false);
    let r = check_value(item(&report, "channel"), "column_sum");
    assert!((r - 0.1).abs() < 1e-12, "{r}");
}

#[test]
fn teleport_demo_matches_golden_file() {
    let out = entsym(&["demo", "teleport-d2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read(format!("{SCENES}/teleport-d2.golden.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), String::from_utf8(golden).unwrap());
}

#[test]
fn teleport_demos_have_two_small_scheme_residuals() {
    for name in ["teleport-d2", "teleport-d3"] {
        let out = entsym(&["demo", name, "--format", "json"]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let report = json(&out);
        let schemes = item(&report, "coding_schemes");
        let checks = schemes["checks"].as_array().unwrap();
        assert_eq!(checks.len(), 2);
        assert!(checks.iter().all(|c| c["value"].as_f64().unwrap() <= 1e-9));
        for i in report["items"].as_array().unwrap() {
            for c in i["checks"].as_array().unwrap() {
                if c["bound"] == "at_most" && c["name"] != "blahut_arimoto_agreement" {
                    assert!(c["value"].as_f64().unwrap() <= 1e-9, "{name}: {c}");
                }
            }
        }
    }
}

#[test]
fn dense_coding_demo_reports_two_bits() {
    let report = json(&entsym(&["demo", "densecode-d2", "--format", "json"]));
    assert_eq!(report["passed"], true);
    let cap = item(&report, "capacity");
    assert!((value(cap, "image_entanglement_assisted_bits") - 2.0).abs() < 1e-12);
    assert!((value(cap, "image_quantum_entanglement_assisted_qubits") - 1.0).abs() < 1e-12);
}

#[test]
fn bsc_demo_capacities() {
    let report = json(&entsym(&["demo", "bsc-capacity", "--format", "json"]));
    assert_eq!(report["passed"], true);
    let caps: Vec<&Value> = report["items"].as_array().unwrap().iter().filter(|i| i["kind"] == "capacity").collect();
    assert_eq!(value(caps[0], "capacity_bits"), 0.0);
    let expected = 1.0 - entropy_bits(&[0.11, 0.89]);
    assert!((value(caps[1], "capacity_bits") - expected).abs() < 1e-12);
    // Z-channel with crossover p: log2(1 + (1-p) p^(p/(1-p)))
    let p: f64 = 0.3;
    let z = (1.0 + (1.0 - p) * p.powf(p / (1.0 - p))).log2();
    assert!((value(caps[2], "blahut_arimoto_bits") - z).abs() < 1e-9);
}

#[test]
fn reports_are_deterministic_and_record_the_seed() {
    let scene = example("qubit-pauli.json");
    let a = entsym(&["check", &scene, "--format", "json", "--seed", "3"]);
    let b = entsym(&["check", &scene, "--format", "json", "--seed", "3"]);
    let c = entsym(&["check", &scene, "--format", "json", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json(&a)["seed"], 3);
}

#[test]
fn transform_emits_diagonal_f_mu() {
    let out = entsym(&["transform", &example("qubit-pauli.json"), "--cocycle", "psi", "--channel", "noisy", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let t = item(&report, "transform");
    let f_mu = t["output"]["f_mu"].as_array().unwrap();
    // p = (0.7, 0.1, 0.1, 0.1): diagonal entries Σ_χ p(χ) χ(g) are 1 and 0.6
    for (r, row) in f_mu.iter().enumerate() {
        for (c, z) in row.as_array().unwrap().iter().enumerate() {
            let re = z[0].as_f64().unwrap();
            let expected = match (r == c, r) {
                (false, _) => 0.0,
                (true, 0) => 1.0,
                (true, _) => 0.6,
            };
            assert!((re - expected).abs() < 1e-12 && z[1].as_f64().unwrap().abs() < 1e-12, "({r},{c}) = {z}");
        }
    }
    assert_eq!(t["output"]["target"]["grading"], serde_json::json!([[0, 0], [0, 1], [1, 0], [1, 1]]));
}

#[test]
fn transform_rejects_non_covariant_channel() {
    let out = entsym(&["transform", &example("non-covariant.json"), "--cocycle", "one", "--channel", "reset"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("covariance") && text.contains("VIOLATED"), "{text}");
}

#[test]
fn capacity_with_quantum_image() {
    let out = entsym(&[
        "capacity",
        &example("qubit-pauli.json"),
        "--channel",
        "noisy",
        "--quantum-image",
        "psi",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let cap = item(&report, "capacity");
    let expected = 2.0 - entropy_bits(&[0.7, 0.1, 0.1, 0.1]);
    assert!((value(cap, "capacity_bits") - expected).abs() < 1e-12);
    assert!((value(cap, "image_entanglement_assisted_bits") - expected).abs() < 1e-12);
    assert_eq!(check_value(cap, "certificate"), 1.0);
}

#[test]
fn capacity_image_needs_a_representation() {
    let out = entsym(&[
        "capacity",
        &example("non-covariant.json"),
        "--channel",
        "reset",
        "--quantum-image",
        "one",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("no representation"));
}

#[test]
fn coboundary_caveat_scene() {
    let report = json(&entsym(&["check", &example("coboundary-caveat.toml"), "--format", "json"]));
    assert_eq!(report["passed"], true);
    let d = value(item(&report, "coboundary_caveat"), "difference");
    assert!((d - 2f64.sqrt()).abs() < 1e-12, "{d}");
}

#[test]
fn unknown_name_is_a_schema_error_with_line() {
    let scene = "{\n  \"algebras\": [\n    {\"name\": \"A\", \"kind\": \"matrix\", \"d\": 2}\n  ],\n  \"channels\": [\n    {\"name\": \"f\", \"kind\": \"identity\", \"algebra\": \"B\"}\n  ]\n}\n";
    let out = entsym_stdin(&["check", "-"], scene);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 6") && err.contains("unknown algebra 'B'"), "{err}");
}

#[test]
fn forward_reference_is_rejected() {
    let scene = r#"{"channels": [{"name": "f", "kind": "identity", "algebra": "A"}],
                   "algebras": [{"name": "A", "kind": "matrix", "d": 2}],
                   "tasks": [{"kind": "capacity", "channel": "g"}]}"#;
    assert_eq!(entsym_stdin(&["check", "-"], scene).status.code(), Some(2));
    let scene = r#"{"algebras": [{"name": "A", "kind": "matrix", "d": 2}],
                   "tasks": [{"kind": "capacity", "channel": "g"}]}"#;
    assert_eq!(entsym_stdin(&["check", "-"], scene).status.code(), Some(2));
}

#[test]
fn malformed_documents_are_schema_errors() {
    for scene in [
        "{\"algebras\": [{\"name\": \"A\", \"kind\": \"matrx\", \"d\": 2}]}",
        "{\"algebras\": [{\"name\": \"A\", \"kind\": \"matrix\", \"d\": 2, \"extra\": 1}]}",
        "{\"groups\": [{\"name\": \"G\", \"orders\": [1]}]}",
        "{\"cocycles\": [{\"name\": \"c\", \"generator\": \"weyl:x\"}]}",
        "{\"algebras\": [{\"name\": \"A\", \"kind\": \"matrix\", \"d\": 2}, {\"name\": \"A\", \"kind\": \"matrix\", \"d\": 3}]}",
        "{not json",
    ] {
        let out = entsym_stdin(&["check", "-"], scene);
        assert_eq!(out.status.code(), Some(2), "{scene}");
        assert!(String::from_utf8(out.stderr).unwrap().contains("schema error"));
    }
}

#[test]
fn toml_from_stdin() {
    let scene = "name = \"t\"\n[[algebras]]\nname = \"A\"\nkind = \"multimatrix\"\nblocks = [1, 2]\n";
    let out = entsym_stdin(&["check", "-"], scene);
    assert_eq!(out.status.code(), Some(0));
    let bad = "name = \"t\"\n[[algebras]]\nname = \"A\"\nkind = \"matrix\"\nd = \"two\"\n";
    let out = entsym_stdin(&["check", "-"], bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line"));
}

#[test]
fn invalid_cocycle_table_fails_check() {
    let scene = r#"{"groups": [{"name": "G", "orders": [2]}],
                   "cocycles": [{"name": "bad", "group": "G", "table": [[[0, 1], 1], [1, 1]]}]}"#;
    let out = entsym_stdin(&["check", "-", "--format", "json"], scene);
    assert_eq!(out.status.code(), Some(1));
    let r = check_value(item(&json(&out), "cocycle"), "cocycle_identity");
    assert!(r > 0.5, "{r}");
}

#[test]
fn tolerance_flag_is_applied() {
    let out = entsym(&["demo", "teleport-d3", "--tol", "1e-17", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["tolerance"], 1e-17);
    assert_eq!(entsym(&["demo", "teleport-d3", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn published_schema_lists_every_kind() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/scene.schema.json")).unwrap();
    let text = schema.to_string();
    for kind in [
        "matrix", "multimatrix", "commutative", "group_algebra", "tensor", "identity",
        "completely_mixing", "covariant", "random_covariant", "compose", "classical",
        "teleportation", "dense_coding", "entangled_pair", "transform", "coding_schemes",
        "capacity", "random_transforms", "functoriality", "coboundary_caveat",
    ] {
        assert!(text.contains(&format!("\"{kind}\"")), "{kind} missing from schema");
    }
}
