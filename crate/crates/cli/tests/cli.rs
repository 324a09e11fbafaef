use nctorus::arithmetic::{ConvergentPair, ThetaValue};
use nctorus::ktheory::{kmatrix_closed, kmatrix_of_identity};
use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctorus")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (v, out.status.code().unwrap())
}

fn k_of(v: &Value) -> Vec<Vec<i64>> {
    serde_json::from_value(v["K"].clone()).unwrap()
}

#[test]
fn convergents_mark_standing_pairs() {
    let (v, code) = json(&["convergents", "--theta", "golden", "--depth", "12", "--format", "json"]);
    assert_eq!(code, 0);
    let hit = v["pairs"].as_array().unwrap().iter().find(|r| {
        r["pair"]["p"] == 3 && r["pair"]["q"] == 5 && r["pair"]["p'"] == 5 && r["pair"]["q'"] == 8
    });
    assert_eq!(hit.unwrap()["standing"], true);
    // JSON output re-serializes to the same document
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["convergents", "--theta", "0.5"],
        vec!["convergents", "--depth", "65"],
        vec!["kmatrix", "--pair", "3,5,5"],
        vec!["kmatrix", "--pair", "3,5,2,3"],
        vec!["verify", "--tolerance", "snap=1"],
        vec!["verify", "--tolerance", "bogus=1e-6"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run(&["convergents", "--theta", "cf:1,x"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 5"));
}

#[test]
fn kmatrix_parity_case_and_identity() {
    let th = ThetaValue::golden().value();
    let (v, code) = json(&["kmatrix", "--pair", "1,2,2,3", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(v["parity_case"], "q even");
    let want = kmatrix_closed(&ConvergentPair::new(th, 1, 2, 2, 3).unwrap());
    assert_eq!(k_of(&v), want.0.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    let (v, code) = json(&["kmatrix", "--element", "identity", "--verify", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(k_of(&v), kmatrix_of_identity().0.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
}

#[test]
fn kmatrix_verify_golden_pair() {
    let (v, code) = json(&["kmatrix", "--pair", "3,5,5,8", "--verify", "--format", "json"]);
    assert_eq!(code, 0);
    let cols = v["oracle"].as_array().unwrap();
    assert_eq!(cols.len(), 6);
    for c in cols {
        assert!(c["tau_residual"].as_f64().unwrap() < 1e-6 && c["phi_residual"].as_f64().unwrap() < 1e-6);
        assert_eq!(c["snapped_match"], true);
    }
}

#[test]
fn gap_failure_suggests_deeper_pair() {
    let out = run(&["kmatrix", "--pair", "1,2,2,3", "--verify"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--pair 3,5,5,8"));
}

#[test]
fn orbit_report_and_parity_guard() {
    let (v, code) = json(&["orbit", "--theta", "golden-complement", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"].as_array().unwrap().len(), 6);
    assert_eq!(v["pairwise_distinct"], true);
    assert_eq!(v["character_shared"], true);
    let out = run(&["orbit", "--pair", "3,5,5,8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q even and p' odd"));
}

#[test]
fn verify_is_deterministic_and_writes_files() {
    let dir = std::env::temp_dir().join(format!("nctorus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut docs = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.join(name);
        let out = run(&["verify", "--level", "fast", "--seed", "7", "--format", "json", "--out", path.to_str().unwrap()]);
        // the S3 display comparison is a recorded failure, so the suite exits 1
        assert_eq!(out.status.code(), Some(1));
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        for c in v["checks"].as_array_mut().unwrap() {
            c["seconds"] = Value::Null;
        }
        docs.push(v);
    }
    assert_eq!(docs[0], docs[1]);
    let failed: Vec<i64> = docs[0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["id"].as_i64().unwrap())
        .collect();
    assert_eq!(failed, vec![7]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_output() {
    let out = run(&["convergents", "--depth", "6", "--format", "csv"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("p,q,p',q',tau,parity_case,standing,warning"));
    assert!(s.contains("\"q, q' odd\""));
}
