use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn write_input(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ppm-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn ppm(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ppm")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn ppm_json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (code, out) = ppm(&all);
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn scale_and_tidy() {
    let m = write_input("shear.json", r#"{"p": 3, "n": 2, "entries": [["1", "1/3"], ["0", "1"]]}"#);
    let m = m.to_str().unwrap();
    let (code, v) = ppm_json(&["scale", m]);
    assert_eq!((code, v["scale_exponent"].as_i64()), (0, Some(0)));

    let (code, v) = ppm_json(&["tidy", m]);
    assert_eq!(code, 0);
    assert_eq!(v["iteration_trace"], serde_json::json!([[0, 1], [1, 0]]));
    assert_eq!(v["minimizing_lattice"]["entries"], serde_json::json!([["1", "0"], ["0", "3"]]));
    assert_eq!(v["minimizing_lattice"]["lattice"], true);

    let (code, _) = ppm_json(&["tidy", "--cap", "0", m]);
    assert_eq!(code, 2);
}

#[test]
fn flag_and_typer() {
    let g = write_input(
        "gens.json",
        r#"{"p": 3, "n": 2, "gens": [[["1","1"],["0","1"]], [["1","1/3"],["0","1"]]]}"#,
    );
    let g = g.to_str().unwrap();
    let (code, v) = ppm_json(&["flag", "--refine", g]);
    assert_eq!(code, 0);
    assert_eq!(v["flag"]["dims"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["boundedness"]["verdict"], "Bounded");

    let bad = write_input("bad.json", r#"{"p": 3, "gens": [[["1","1"],["0","1"]], [["1","0"],["1/3","1"]]]}"#);
    let (code, v) = ppm_json(&["typer", "--word-len", "2", bad.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["Witness"], serde_json::json!([1, 2]));
    let (code, _) = ppm(&["flag", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
}

#[test]
fn order_root_oracle() {
    let (code, v) = ppm_json(&["order", "GLn_Zp", "-n", "2", "-p", "3"]);
    assert_eq!((code, v["order"].as_str()), (0, Some("2^4 · 3^inf")));

    let a = write_input("units.json", r#"{"p": 3, "n": 1, "entries": [["2"]]}"#);
    let (code, v) = ppm_json(&["oracle", "--level", "2", "-k", "5", a.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v, serde_json::json!({"order": 6, "image_size": 6, "surjective": true, "f1_agree": true}));

    let x = write_input("cube.json", r#"{"p": 3, "n": 1, "entries": [["4"]]}"#);
    let (code, v) = ppm_json(&["root", "--kind", "finite", "-k", "3", "--level", "2", x.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["NoRoot"]["level"], 2);

    let ax = write_input("axb.json", r#"{"p": 5, "a": "1", "b": "5"}"#);
    let (code, v) = ppm_json(&["root", "--kind", "axb", "-k", "5", "--level", "6", ax.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(v["result"]["Found"].is_object());
}

#[test]
fn analyze_verdicts_and_exit_codes() {
    let (code, v) = ppm_json(&["analyze", "AxB_ZpUnits", "-k", "3", "-p", "5", "--precision", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["conclusion"], "SurjectiveAndDense");
    assert!(v["citations"].as_array().unwrap().iter().any(|c| c == "profinite_coprime_order"));

    let (code, v) = ppm_json(&["analyze", "AdditiveZp", "-k", "3", "-p", "3"]);
    assert_eq!((code, v["conclusion"].as_str()), (0, Some("NotDense")));

    let g = write_input("fg.json", r#"{"p": 3, "gens": [[["1","1"],["0","1"]]]}"#);
    let (code, v) = ppm_json(&["analyze", g.to_str().unwrap(), "-k", "2"]);
    assert_eq!((code, v["conclusion"].as_str()), (2, Some("Inconclusive")));

    let (code, _) = ppm(&["analyze", "NoSuchGroup", "-k", "2", "-p", "3"]);
    assert_eq!(code, 3);
    let (code, _) = ppm(&["analyze", "UnitsZp", "-k", "2", "-p", "3", "--characteristic", "3"]);
    assert_eq!(code, 3);
    let (code, _) = ppm(&["analyze", "UnitsZp", "-k", "2", "-p", "4"]);
    assert_eq!(code, 3);
}
