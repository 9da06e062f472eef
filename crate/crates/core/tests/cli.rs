use std::path::Path;
use std::process::Command;

use qtl::algebra::{bracket, import_structure, GradedElement, StructureRecord};
use qtl::lattice::{box_points, NormalFormSpec, QuantumTorus};

fn qtl(config: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qtl"))
        .arg("--config")
        .arg(config)
        .args(args)
        .env_remove("QTL_THREADS")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const K22: &str = r#"{"normal_form":{"d":2,"z":1,"orders":[2,2]}}"#;

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "k22.json", K22);
    assert_eq!(qtl(&good, &["verify-jacobi", "--box", "2"]).0, 0);
    assert_eq!(qtl(&good, &["extension-check", "--box", "2"]).0, 0);

    let (code, body) = qtl(&good, &["derivations", "--degree", "0,0", "--box", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["details"]["dimension"], 2);

    let k33 = write(dir.path(), "k33.json", r#"{"normal_form":{"d":2,"z":1,"orders":[3,3]}}"#);
    let (code, body) = qtl(&k33, &["cocycle-solve", "--box", "3"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert!(!v["counterexamples"].as_array().unwrap().is_empty());

    let bad = write(dir.path(), "d1.json", r#"{"d":1,"n":1,"exps":[[0]]}"#);
    assert_eq!(qtl(&bad, &["verify-jacobi"]).0, 2);
    let bad = write(dir.path(), "k23.json", r#"{"normal_form":{"d":2,"z":1,"orders":[2,3]}}"#);
    assert_eq!(qtl(&bad, &["verify-jacobi"]).0, 2);
    assert_eq!(qtl(&dir.path().join("missing.json"), &["verify-jacobi"]).0, 2);
    assert_eq!(qtl(&good, &["no-such-command"]).0, 2);
    assert_eq!(qtl(&good, &["derivations", "--degree", "1"]).0, 2);
}

#[test]
fn deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k22.json", K22);
    for args in [
        vec!["verify-jacobi", "--box", "1"],
        vec!["verify-embedding", "--box", "1"],
        vec!["automorphism", "--lambda", "-1", "--chi", "1,0", "--box", "1"],
        vec!["derivations", "--degree", "1,0", "--box", "2"],
        vec!["cocycle-solve", "--box", "2"],
        vec!["extension-check", "--box", "1"],
        vec!["export-structure", "--box", "1"],
        vec!["verify-virasoro", "--box", "1"],
    ] {
        let a = qtl(&cfg, &args);
        let b = qtl(&cfg, &args);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k22.json", K22);
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let code = qtl(&cfg, &["export-structure", "--box", "1", "--out", out.to_str().unwrap()]).0;
        assert_eq!(code, 0);
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());

    let records: Vec<StructureRecord> = serde_json::from_slice(&a).unwrap();
    assert_eq!(records.len(), 81);
    let torus = QuantumTorus::from_normal_form(NormalFormSpec::new(2, 1, vec![2, 2]).unwrap());
    let table = import_structure(&torus, &records).unwrap();
    for x in box_points(2, 1) {
        for y in box_points(2, 1) {
            let bx = GradedElement::l(&torus, x.coords()).unwrap();
            let by = GradedElement::l(&torus, y.coords()).unwrap();
            assert_eq!(table[&(x.clone(), y.clone())], bracket(&torus, &bx, &by).unwrap());
        }
    }

    let (code, body) = qtl(&cfg, &["export-structure", "--box", "0"]);
    assert_eq!(code, 0);
    let records: Vec<StructureRecord> = serde_json::from_str(&body).unwrap();
    assert_eq!(records.len(), 1);
    assert!(records[0].bracket.is_empty());
}

#[test]
fn threads_do_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k22.json", K22);
    let serial = qtl(&cfg, &["verify-jacobi", "--box", "1"]);
    let out = Command::new(env!("CARGO_BIN_EXE_qtl"))
        .args(["--config", cfg.to_str().unwrap(), "verify-jacobi", "--box", "1"])
        .env("QTL_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), serial.1);
}
