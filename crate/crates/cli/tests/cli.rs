use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    doc: Value,
}

fn run(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_foliakit")).current_dir(dir).args(args).output().expect("spawn");
    let text = String::from_utf8(out.stdout).unwrap();
    let doc = if text.trim().is_empty() { Value::Null } else { serde_json::from_str(&text).expect("one JSON document") };
    Run { code: out.status.code().unwrap(), doc }
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

/// The standard pull-back: squares map scaled by 1,4,9,16 and the quadratic cyclic field on P^3.
fn standard(dir: &Path) {
    assert_eq!(run(dir, &["build", "jouanolou", "--n", "4", "--d", "2", "--out", "J.json"]).code, 0);
    let m = ["build", "map", "--diagonal-difference", "--n", "4", "--nu", "2", "--coefficients", "1,4,9,16", "--out", "f.json"];
    assert_eq!(run(dir, &m).code, 0);
    assert_eq!(run(dir, &["build", "pullback", "--map", "f.json", "--fol", "J.json", "--out", "eta.json"]).code, 0);
}

fn verdicts(doc: &Value) -> Vec<(String, String)> {
    doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["name"].as_str().unwrap().to_owned(), c["verdict"].as_str().unwrap().to_owned()))
        .collect()
}

fn single_term(nvars: usize, c: &str, e: &[u32]) -> Value {
    json!({ "nvars": nvars, "terms": [{ "c": c, "e": e }] })
}

#[test]
fn cyclic_field_has_shifted_squares() {
    let dir = TempDir::new().unwrap();
    let r = run(dir.path(), &["build", "jouanolou", "--n", "3", "--d", "2"]);
    assert_eq!(r.code, 0);
    let want = json!({
        "nvars": 3,
        "components": [single_term(3, "1", &[0, 2, 0]), single_term(3, "1", &[0, 0, 2]), single_term(3, "1", &[2, 0, 0])]
    });
    assert_eq!(r.doc, want);
}

#[test]
fn diagonal_difference_map() {
    let dir = TempDir::new().unwrap();
    let r = run(dir.path(), &["build", "map", "--diagonal-difference", "--n", "4", "--nu", "2"]);
    assert_eq!(r.code, 0);
    let comps = r.doc["components"].as_array().unwrap();
    assert_eq!(comps.len(), 4);
    for (i, c) in comps.iter().enumerate() {
        let mut a = vec![0u32; 5];
        a[i] = 2;
        let b = [0, 0, 0, 0, 2];
        let terms = c["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 2);
        assert!(terms.contains(&json!({ "c": "1", "e": a })));
        assert!(terms.contains(&json!({ "c": "-1", "e": b })));
    }
}

#[test]
fn built_pullback_verifies_with_degree_seven() {
    let dir = TempDir::new().unwrap();
    standard(dir.path());
    let r = run(dir.path(), &["verify", "foliation", "--input", "eta.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.doc["verdict"], "pass");
    assert!(verdicts(&r.doc).iter().all(|(_, v)| v == "pass"));
    assert_eq!(r.doc["checks"][4]["details"]["degree"], 7);
    assert!(r.doc["checks"].as_array().unwrap().iter().all(|c| !c["anchor"].as_str().unwrap().is_empty()));
    assert_eq!(r.doc["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn reserialized_input_gives_the_same_digest() {
    let dir = TempDir::new().unwrap();
    standard(dir.path());
    let a = run(dir.path(), &["verify", "foliation", "--input", "eta.json"]);
    let text = std::fs::read_to_string(dir.path().join("eta.json")).unwrap();
    let compact: Value = serde_json::from_str(&text).unwrap();
    write(dir.path(), "eta2.json", &compact);
    let b = run(dir.path(), &["verify", "foliation", "--input", "eta2.json"]);
    assert_eq!(a.doc["digest"], b.doc["digest"]);
    assert_eq!(a.doc, b.doc);
}

#[test]
fn pure_squares_fail_transversality() {
    let dir = TempDir::new().unwrap();
    let m = ["build", "map", "--diagonal-difference", "--n", "4", "--nu", "2", "--coefficients", "0,0,0,0", "--out", "sq.json"];
    assert_eq!(run(dir.path(), &m).code, 0);
    let r = run(dir.path(), &["verify", "generic-map", "--map", "sq.json"]);
    assert_eq!(r.code, 1);
    assert!(verdicts(&r.doc).contains(&("transversality".into(), "fail".into())));
}

#[test]
fn stability_hypotheses_hold_for_the_standard_pullback() {
    let dir = TempDir::new().unwrap();
    standard(dir.path());
    let r = run(dir.path(), &["verify", "stability-hypotheses", "--input", "eta.json", "--seed", "3"]);
    assert_eq!(r.code, 0, "{}", r.doc);
    let v = verdicts(&r.doc);
    assert_eq!(&v[..3].iter().map(|(_, x)| x.as_str()).collect::<Vec<_>>(), &["pass", "pass", "pass"]);
    assert_eq!(v[3].1, "evidence");
    assert_eq!(r.doc["checks"][3]["details"]["summary"], "no invariant hypersurface up to degree 1");
    assert_eq!(r.doc["seed"], 3);
}

#[test]
fn deformation_exit_codes() {
    let dir = TempDir::new().unwrap();
    standard(dir.path());
    let g = json!({
        "nvars": 5,
        "components": [
            single_term(5, "1", &[1, 1, 0, 0, 0]),
            single_term(5, "2", &[0, 0, 1, 0, 1]),
            single_term(5, "-1", &[0, 1, 0, 1, 0]),
            single_term(5, "1", &[1, 0, 0, 0, 1]),
        ]
    });
    write(dir.path(), "g.json", &g);
    let r = run(dir.path(), &["deform", "--foliation", "eta.json", "--perturb", "g.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.doc["report"]["paths"].as_array().unwrap().len(), 16);
    assert_eq!(r.doc["report"]["lost"], 0);
    let empty = run(dir.path(), &["deform", "--foliation", "eta.json", "--perturb", "g.json", "--t-grid", ""]);
    assert_eq!(empty.code, 0);
    assert_eq!(empty.doc["report"]["lost"], 0);
    let far = run(dir.path(), &["deform", "--foliation", "eta.json", "--perturb", "g.json", "--t-grid", "10"]);
    assert_eq!(far.code, 3);
}

#[test]
fn sigma_reports() {
    let dir = TempDir::new().unwrap();
    let r = run(dir.path(), &["sigma", "--weights", "1,1,1", "--level", "0"]);
    assert_eq!(r.doc["dim"], 9);
    assert_eq!(run(dir.path(), &["build", "jouanolou", "--n", "3", "--d", "2", "--out", "J.json"]).code, 0);
    let k = run(dir.path(), &["sigma", "--weights", "1,1,1", "--level", "1", "--field", "J.json"]);
    assert_eq!(k.doc["kernel"]["kernel_dim"], 0);
    let res = run(dir.path(), &["sigma", "--weights", "1,2,5"]);
    assert!(res.doc["resonances"]["nontrivial"].as_array().unwrap().contains(&json!({ "sigma": [1, 2, 0], "j": 2 })));
    assert_eq!(run(dir.path(), &["sigma", "--weights", "1,1,1", "--level", "0", "--field", "J.json"]).code, 2);
}

#[test]
fn planar_singularities_are_solved_and_classified() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["build", "jouanolou", "--n", "3", "--d", "2", "--out", "J.json"]).code, 0);
    let r = run(dir.path(), &["solve", "singularities", "--fol", "J.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.doc["report"]["found"], 7);
    assert!(r.doc["report"]["points"].as_array().unwrap().iter().all(|p| p["classification"] == "hyperbolic"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["build", "jouanolou", "--n", "1", "--d", "2"]).code, 2);
    assert_eq!(run(dir.path(), &["verify", "foliation", "--input", "missing.json"]).code, 2);
    assert_eq!(run(dir.path(), &["frobnicate"]).code, 2);
}

#[test]
fn same_seed_same_report() {
    let dir = TempDir::new().unwrap();
    standard(dir.path());
    let a = run(dir.path(), &["verify", "generic-map", "--map", "f.json", "--seed", "9"]);
    let b = run(dir.path(), &["verify", "generic-map", "--map", "f.json", "--seed", "9"]);
    assert_eq!(a.doc, b.doc);
    assert_eq!(a.doc["tolerances"]["seed"], 9);
}
