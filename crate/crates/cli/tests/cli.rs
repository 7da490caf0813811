use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_isotropy");

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, PathBuf) {
    let out = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let s = out.to_str().unwrap().to_string();
    full.extend(["--out", &s]);
    let o = run(&full);
    (o.status.code().unwrap(), out)
}

fn read(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_family_is_nondegenerate() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), "a.json", &["analyze", "--group", "family_gn:3,3", "--cocycle", "family_cr:1"]);
    assert_eq!(code, 0);
    let r = read(&out);
    assert_eq!(r["results"]["nondegeneracy"]["nondegenerate"], true);
    assert_eq!(r["results"]["nondegeneracy"]["regular_classes"], 1);
    assert!(dir.path().join("a.json.timing.json").exists());
    assert!(r.get("timing").is_none());
}

#[test]
fn order36_has_no_normal_lagrangian() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) =
        run_to(dir.path(), "l.json", &["lagrangian", "--normal-only", "--group", "order36", "--cocycle", "fixture"]);
    assert_eq!(code, 3);
    assert_eq!(read(&out)["results"]["status"], "certified_none");
}

#[test]
fn rank_lemma_five() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), "r.json", &["rank-lemma", "--p", "5", "--n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(read(&out)["results"]["min_rank"], 3);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["construct", "--group", "symplectic_std:3,2", "--cocycle", "standard", "--k", "2"];
    let (_, a) = run_to(dir.path(), "1.json", &args);
    let o = Command::new(BIN)
        .args(args)
        .args(["--out", dir.path().join("2.json").to_str().unwrap()])
        .env("ISOTROPY_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(dir.path().join("2.json")).unwrap());
}

#[test]
fn fresh_report_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) =
        run_to(dir.path(), "i.json", &["isotropy", "--group", "symplectic_std:3,2", "--cocycle", "standard", "--subgroup", "1,3"]);
    assert_eq!(code, 0);
    let o = run(&["verify", "--report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn tampered_witness_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let (_, out) =
        run_to(dir.path(), "i.json", &["isotropy", "--group", "heisenberg:3", "--cocycle", "trivial:3", "--subgroup", "1,3"]);
    let mut r = read(&out);
    let w = r["witnesses"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|w| w["check"] == "isotropy_cochain")
        .expect("cochain witness present");
    let v = w["values"][1].as_u64().unwrap();
    w["values"][1] = (v + 1).into();
    std::fs::write(&out, serde_json::to_string_pretty(&r).unwrap()).unwrap();
    let o = run(&["verify", "--report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("isotropy cochain"), "{}", stderr(&o));
}

#[test]
fn modified_input_is_a_digest_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    std::fs::copy(data("z3xz3.json"), &g).unwrap();
    let (code, out) =
        run_to(dir.path(), "a.json", &["analyze", "--group", g.to_str().unwrap(), "--cocycle", "trivial:3"]);
    assert_eq!(code, 3);
    let mut text = std::fs::read_to_string(&g).unwrap();
    text.push('\n');
    std::fs::write(&g, text).unwrap();
    let o = run(&["verify", "--report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("digest mismatch"), "{}", stderr(&o));
}

#[test]
fn malformed_spec_cites_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.json");
    std::fs::write(&g, r#"{"kind": "cayley", "order": 2, "table": [[0, 1], [1]]}"#).unwrap();
    let o = run(&["analyze", "--group", g.to_str().unwrap(), "--cocycle", "trivial"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("$.table[1]"), "{}", stderr(&o));
}

#[test]
fn unknown_verb_and_unknown_shorthand() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let o = run(&["analyze", "--group", "nosuchgroup:3", "--cocycle", "trivial"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn obstruct_family_a() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(
        dir.path(),
        "o.json",
        &["obstruct", "--group", "family_gn:3,3", "--cocycle", "family_cr:1", "--subgroup", "243,729,2187"],
    );
    assert_eq!(code, 0);
    let r = read(&out);
    assert_eq!(r["results"]["m_order"], 27);
    assert_eq!(run(&["verify", "--report", out.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn iyb_and_cup_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pi = data("pi_z3.json");
    let (code, out) = run_to(dir.path(), "b.json", &["iyb-build", "--pi", pi.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = read(&out);
    assert_eq!(r["results"]["bijective"], true);
    assert_eq!(r["results"]["roundtrip"]["pi_recovered"], serde_json::json!([[0], [1], [2]]));

    // Export the semidirect product and extract π back through the CLI.
    let export = &r["results"]["export"];
    let g = dir.path().join("g.json");
    let c = dir.path().join("c.json");
    std::fs::write(&g, export["group"].to_string()).unwrap();
    std::fs::write(&c, export["cocycle"].to_string()).unwrap();
    let (code, _) = run_to(
        dir.path(),
        "x.json",
        &["iyb-extract", "--group", g.to_str().unwrap(), "--cocycle", c.to_str().unwrap(), "--subgroup", "3"],
    );
    assert_eq!(code, 0);

    let (code, _) =
        run_to(dir.path(), "cup.json", &["cup", "--pi", pi.to_str().unwrap(), "--beta", data("beta_zero.json").to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn twisted_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), "l.json", &["lift", "--heisenberg", "3"]);
    assert_eq!(code, 0);
    assert_eq!(read(&out)["results"]["sum_of_squares"], 27);
    let (code, out) =
        run_to(dir.path(), "s.json", &["obstruction-scalar", "--group", "family_gn:3,3", "--cocycle", "family_cr:0"]);
    assert_eq!(code, 0);
    assert_eq!(read(&out)["results"]["alpha_r_s"], 0);
    let (code, _) = run_to(dir.path(), "s1.json", &["obstruction-scalar", "--group", "family_gn:3,3", "--cocycle", "family_cr:1"]);
    assert_eq!(code, 3);
    let (code, _) = run_to(dir.path(), "nu.json", &["nu", "--group", "family_gn:3,3", "--cocycle", "family_cr:2"]);
    assert_eq!(code, 0);
    let (code, _) = run_to(
        dir.path(),
        "t.json",
        &["transgress", "--group", "heisenberg:3", "--subgroup", "1", "--images", "1:1", "--modulus", "3"],
    );
    assert_eq!(code, 0);
}

#[test]
fn threshold_is_inconclusive() {
    let o = run(&["h2", "--group", "heisenberg:5", "--modulus", "5"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn report_matches_schema_shape() {
    let schema: Value = serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (_, out) = run_to(dir.path(), "t.json", &["tower", "--group", "heisenberg:3", "--cocycle", "trivial:3"]);
    let r = read(&out);
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(|s| s.as_str()).collect();
    for k in &required {
        assert!(keys.contains(k), "missing {k}");
    }
    assert_eq!(keys.len(), required.len());
    assert_eq!(r["schema"], schema["$id"]);
}
