use std::path::PathBuf;
use std::process::{Command, Output};

use parahecke::{HeckeAlgebra, LaurentPoly};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parahecke"))
        .args(args)
        .env_remove("PARAHECKE_CACHE_DIR")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("parahecke-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&p);
    std::fs::create_dir_all(&p).unwrap();
    p
}

fn a1() -> HeckeAlgebra {
    HeckeAlgebra::from_json_str(parahecke::bundled::bundled("a1").unwrap()).unwrap()
}

#[test]
fn theta_of_positive_coroot() {
    let h = a1();
    let v = json(&run(&["theta", "t[1]", "--datum", "a1"]));
    let shifted = |s: usize| h.gen(s).sub(&h.one().scale(&(&LaurentPoly::q() - &LaurentPoly::one())));
    let expect = h.im_mul(&shifted(0), &shifted(1)).scale(&LaurentPoly::q_pow(-2));
    assert_eq!(v["theta"], h.to_json(&expect));
    assert_eq!(v["m"], "1");
}

#[test]
fn multiply_and_invert() {
    let h = a1();
    let v = json(&run(&["multiply", "s1", "s1", "--datum", "a1"]));
    let qs = LaurentPoly::q();
    let expect = h.gen(1).scale(&(&qs - &LaurentPoly::one())).add(&h.one().scale(&qs));
    assert_eq!(v["product"], h.to_json(&expect));
    let v = json(&run(&["invert", "s1·s0", "--datum", "a1"]));
    let inv = h.from_json(&v["inverse"]).unwrap();
    let w = h.datum.product_of_word(&[1, 0]);
    assert_eq!(h.im_mul(&h.basis(&w), &inv), h.one());
}

#[test]
fn satake_rows_for_height_two() {
    let v = json(&run(&["satake", "--datum", "a1", "--height", "2"]));
    let xs: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["x"].as_str().unwrap()).collect();
    assert_eq!(xs, ["0", "-1", "-2"]);
    let row = &v["rows"][1];
    assert_eq!(row["entries"][1]["m"], "0");
    assert_eq!(row["entries"][1]["coeff"], serde_json::json!([[0, -1], [2, 1]]));
    assert_eq!(row["checks"]["diag_one"], true);
    assert_eq!(row["checks"]["triangular"], true);
    assert_eq!(row["checks"]["positive"], true);
}

#[test]
fn gl2_minuscule_rows_are_singletons() {
    let v = json(&run(&["satake", "--datum", "gl2", "--height", "1"]));
    let h = HeckeAlgebra::from_json_str(parahecke::bundled::bundled("gl2").unwrap()).unwrap();
    let d = &h.datum;
    let mut minuscule = 0;
    for row in v["rows"].as_array().unwrap() {
        let x = d.parse_lattice(row["x"].as_str().unwrap()).unwrap();
        if d.saturation_predecessors(&x).unwrap().len() == 1 {
            minuscule += 1;
            assert_eq!(row["entries"].as_array().unwrap().len(), 1);
            assert_eq!(row["entries"][0]["coeff"], serde_json::json!([[0, 1]]));
        }
    }
    assert!(minuscule >= 2);
}

#[test]
fn csv_specializes_q() {
    let out = run(&["satake", "--datum", "a1", "--height", "1", "--format", "csv", "--q", "4"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "x,m,coeff,value\n\"0\",\"0\",\"1\",1\n\"-1\",\"-1\",\"1\",1\n\"-1\",\"0\",\"q - 1\",3\n");
    let out = run(&["satake", "--datum", "a1", "--height", "1", "--format", "csv", "--q", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_presentation_exit_zero() {
    let out = run(&["verify", "presentation", "--datum", "a1", "--format", "pretty"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS A1/quadratic_relation"));
    assert!(text.ends_with("verify: ok\n"));
}

#[test]
fn verify_reports_failures_with_exit_one() {
    let out = run(&["verify", "satake", "--datum", "a1"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failing: Vec<&str> = v["reports"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["satake_entries_nonnegative_coefficients"]);
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("commands: multiply, invert, theta, to-bernstein, center-basis, satake, verify"), "{err}");

    assert_eq!(run(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(run(&["theta", "t[1]"]).status.code(), Some(2));
    assert_eq!(run(&["satake", "--datum", "a1"]).status.code(), Some(2));
    assert_eq!(run(&["theta", "t[1,2]", "--datum", "a1"]).status.code(), Some(2));
    assert_eq!(run(&["center-basis", "0,1", "--datum", "a1", "--height", "1"]).status.code(), Some(2));
    assert_eq!(run(&["satake", "--datum", "a1", "--height", "1", "--facet", "0"]).status.code(), Some(2));
}

#[test]
fn malformed_datum_names_the_cartan_check() {
    let dir = scratch("cartan");
    let path = dir.join("bad.json");
    let text = parahecke::bundled::bundled("a1").unwrap().replace("\"simple_roots\": [[2]]", "\"simple_roots\": [[3]]");
    std::fs::write(&path, text).unwrap();
    let out = run(&["theta", "0", "--datum", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("Cartan"));
}

#[test]
fn center_basis_and_bernstein() {
    let v = json(&run(&["center-basis", "1", "--datum", "a1", "--height", "1"]));
    assert_eq!(v["facet"], serde_json::json!([1]));
    assert_eq!(v["poincare"], serde_json::json!([[0, 1], [2, 1]]));
    assert_eq!(v["elements"].as_array().unwrap().len(), 2);
    let flagged = json(&run(&["center-basis", "--facet", "1", "--datum", "a1", "--height", "1"]));
    assert_eq!(flagged, v);
    let v = json(&run(&["to-bernstein", "t[-1]*s1 + 2", "--datum", "a1"]));
    let terms = v["bernstein"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
}

#[test]
fn out_flag_and_theta_cache() {
    let dir = scratch("cache");
    let out_file = dir.join("theta.json");
    let cache = dir.join("cache");
    let go = || {
        Command::new(env!("CARGO_BIN_EXE_parahecke"))
            .args(["theta", "t[1,0]", "--datum", "a2", "--out", out_file.to_str().unwrap()])
            .env("PARAHECKE_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    assert_eq!(go().status.code(), Some(0));
    let first = std::fs::read(&out_file).unwrap();
    let files: Vec<_> = std::fs::read_dir(&cache).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files.len(), 1);
    assert!(files[0].to_str().unwrap().starts_with("theta-v1-"));
    assert_eq!(go().status.code(), Some(0));
    assert_eq!(std::fs::read(&out_file).unwrap(), first);
}
