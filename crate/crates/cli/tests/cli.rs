use std::process::{Command, Output};

fn qlattice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlattice"))
        .args(args)
        .env_remove("QLATTICE_CAP_OVERRIDE")
        .output()
        .expect("run qlattice")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn tmp(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("qlattice-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn build_writes_five_elements() {
    let path = tmp("z2.json");
    let out = qlattice(&["build", "--kind", "zprime", "--n", "2", "--out", &path]);
    assert!(out.status.success());
    let js: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(js["elements"].as_array().unwrap().len(), 5);
}

#[test]
fn bell_report() {
    let out = qlattice(&["bell", "--na", "2", "--nb", "2"]);
    assert!(out.status.success());
    let js = json(&out);
    assert_eq!(js["phi"]["13"], "N⊗⊥ ⊓ Y⊗N");
    assert_eq!(js["phi"]["24"], "⊥⊗⊥");
    assert_eq!(js["nonlocal"], true);
    assert!(js["lambda"].is_null());
    assert_eq!(js["sigma"]["theta"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_closure_suite() {
    let out = qlattice(&["verify", "--suite", "closure"]);
    assert!(out.status.success());
    let js = json(&out);
    assert_eq!(js["schema"], "qlattice.report/1");
    let checks = js["checks"].as_array().unwrap();
    let once = checks.iter().find(|c| c["name"] == "preclosure-once").unwrap();
    assert_eq!(once["passed"], true);
    assert_eq!(once["witnesses"][0], r#"𝔠(U) = ["w", "z", "y"]"#);
}

#[test]
fn failing_suite_exits_one() {
    let out = qlattice(&["verify", "--suite", "geometry"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL irreducibility"));
}

#[test]
fn parse_errors_exit_two() {
    assert_eq!(qlattice(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qlattice(&["build", "--bogus"]).status.code(), Some(2));
    assert_eq!(qlattice(&["build", "--kind", "nope"]).status.code(), Some(2));
    assert_eq!(qlattice(&["verify", "--suite", "nope"]).status.code(), Some(2));
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = qlattice(&["build", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":1:"));
}

#[test]
fn caps_exit_three() {
    assert_eq!(qlattice(&["tensor", "--cap-elements", "50"]).status.code(), Some(3));
    assert_eq!(qlattice(&["bell", "--cap-tuples", "1000"]).status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_qlattice"))
        .args(["tensor"])
        .env("QLATTICE_CAP_OVERRIDE", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn export_dot_round_trip() {
    let json_path = tmp("rt.json");
    let dot_path = tmp("rt.dot");
    assert!(qlattice(&["build", "--kind", "zprime", "--n", "3", "--out", &json_path]).status.success());
    assert!(qlattice(&["export", "--input", &json_path, "--format", "dot", "--out", &dot_path]).status.success());
    let dot = std::fs::read_to_string(&dot_path).unwrap();
    // Covering edges only: Z'3 has one edge per pure.
    assert_eq!(dot.matches("->").count(), 6);
    let back = qlattice(&["build", "--input", &dot_path]);
    assert!(back.status.success());
    assert_eq!(back.stdout, std::fs::read(&json_path).unwrap());
}

#[test]
fn outputs_are_byte_identical() {
    for args in [&["verify", "--suite", "idempotency", "--seed", "7"][..], &["complete", "--kind", "zprime", "--n", "3"], &["geometry", "--format", "dot"]] {
        let a = qlattice(args);
        let b = qlattice(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn broadcast_verdicts() {
    let z = json(&qlattice(&["broadcast", "--kind", "zprime", "--n", "2"]));
    assert_eq!(z["broadcasts"], false);
    assert_eq!(z["witness"]["bottom_first"], "⊥⊗⊥");
    let s = json(&qlattice(&["broadcast", "--kind", "simplex", "--n", "3"]));
    assert_eq!(s["broadcasts"], true);
}
