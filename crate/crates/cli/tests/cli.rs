use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn dynn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynn")).args(args).output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn act_on_mixed_word() {
    let o = dynn(&["act", "-n", "4", "-w", "-3 2 -1", "-v", "[-1,-1,0,-1]", "--format", "text"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "(2, -3, -1, 0)");
    let v = json(&dynn(&["act", "-n", "4", "-w", "-3 2 -1", "-v", "[-1,-1,0,-1]"]));
    assert_eq!(v["a"], serde_json::json!(["2", "-3"]));
    assert_eq!(v["b"], serde_json::json!(["-1", "0"]));
}

#[test]
fn act_with_empty_word_echoes() {
    let o = dynn(&["act", "-n", "4", "-w", "", "-v", "[1/2,-1,0,3]", "--format", "text"]);
    assert_eq!(stdout(&o), "(1/2, -1, 0, 3)");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dynn(&["act", "-n", "4", "-w", "1", "-v", "[1,2"]).status.code(), Some(2));
    assert_eq!(dynn(&["act", "-n", "4", "-w", "5", "-v", "[1,2,3,4]"]).status.code(), Some(2));
    assert_eq!(dynn(&["act", "-n", "4", "-w", "1", "-v", "[1,2,3]"]).status.code(), Some(2));
    assert_eq!(dynn(&["bogus"]).status.code(), Some(2));
    assert_eq!(dynn(&["matrix", "-n", "3", "-w", "1", "--precision", "128,53"]).status.code(), Some(2));
}

#[test]
fn matrix_and_dilatation() {
    let v = json(&dynn(&["matrix", "-n", "3", "-w", "1 -2"]));
    assert_eq!(v["matrices"].as_array().unwrap().len(), 1);
    assert_eq!(v["matrices"][0]["matrix"], serde_json::json!([["2", "1"], ["1", "1"]]));
    let v = json(&dynn(&["matrix", "-n", "5", "-w", "1 2 3 -4"]));
    assert_eq!(v["matrices"].as_array().unwrap().len(), 2);
    let o = dynn(&["dilatation", "-n", "3", "-w", "1 -2", "--format", "text"]);
    assert_eq!(stdout(&o), "2.61803398875");
    let o = dynn(&["dilatation", "-n", "3", "-w", "1 -2", "--digits", "30", "--format", "text"]);
    assert_eq!(stdout(&o), "2.61803398874989484820458683437");
}

#[test]
fn identity_does_not_converge() {
    let o = dynn(&["dilatation", "-n", "3", "-w", ""]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn long_braid_dilatation() {
    let line = std::fs::read_to_string(fixture("long_braid.txt")).unwrap();
    let v = json(&dynn(&["dilatation", "--line", line.trim()]));
    assert!((v["log_dilatation"].as_f64().unwrap() - 34.38).abs() < 0.01);
}

#[test]
fn compare_spectra() {
    let b4 = fixture("b4_T.json");
    let o = dynn(&["compare", "-n", "4", "-w", "1 -2 3 3 3 2 1 -2", &b4, "--mode", "exact"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["isospectral"], Value::Bool(true));
    let g = fixture("gamma_T.json");
    let word = "1 1 2 2 1 2 3 3 2 1 1 1 1 2 1 1 3 3 2 1";
    assert!(dynn(&["compare", "-n", "4", "-w", word, &g, "--mode", "eigenvalues-one"]).status.success());
    let o = dynn(&["compare", "--dynnikov", &fixture("gamma_D.json"), &g, "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(4));
    for mode in ["exact", "roots-of-unity-and-zeros", "eigenvalues-one"] {
        assert!(dynn(&["compare", "--dynnikov", &b4, &b4, "--mode", mode]).status.success());
    }
}

#[test]
fn regions3_arcs_and_svg() {
    let svg = std::env::temp_dir().join(format!("dynn-regions-{}.svg", std::process::id()));
    let o = dynn(&["regions3", "-n", "3", "-w", "1 -2", "--svg", svg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(json(&o).as_array().unwrap().len(), 6);
    let pic = std::fs::read_to_string(&svg).unwrap();
    assert!(pic.starts_with("<svg") && pic.matches("<path").count() == 6);
    let _ = std::fs::remove_file(svg);
    assert_eq!(json(&dynn(&["regions3", "-n", "3", "-w", ""])).as_array().unwrap().len(), 1);
}

#[test]
fn track_commands() {
    let v = json(&dynn(&["track", "pf", &fixture("gamma_T.json")]));
    assert!(v["dilatation"].as_str().unwrap().starts_with("33.97056274"));
    let x = v["vector"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect::<Vec<_>>();
    assert!((x[1] / x[0] - 2.41421356).abs() < 1e-8);
    let v = json(&dynn(&["track", "extend", &fixture("gamma_track.json")]));
    assert_eq!(v["extensions"].as_array().unwrap().len(), 2);
    let o = dynn(&["track", "conjugacy", &fixture("gamma_D.json"), &fixture("gamma_L1.json"), &fixture("gamma_Tp.json")]);
    assert!(o.status.success());
    assert_eq!(json(&o)["conjugate"], Value::Bool(true));
    let o = dynn(&["track", "conjugacy", &fixture("gamma_D.json"), &fixture("gamma_L2.json"), &fixture("gamma_Tp_partial.json"), "--solve"]);
    assert_eq!(json(&o)["transition"][3], serde_json::json!(["2", "3", "1", "1"]));
    let o = dynn(&["track", "conjugacy", &fixture("gamma_D.json"), &fixture("gamma_L1.json"), &fixture("b4_T.json")]);
    assert_eq!(o.status.code(), Some(4));
    let v = json(&dynn(&["track", "pinch", &fixture("gamma_track.json"), "--edge", "u"]));
    assert_eq!(v["psi"]["eps_u"][0]["coefficient"], 2);
    assert_eq!(dynn(&["track", "pf", &fixture("b4_D.json")]).status.code(), Some(2));
}

#[test]
fn track_coords_closed_form() {
    let mu = std::env::temp_dir().join(format!("dynn-mu-{}.json", std::process::id()));
    std::fs::write(&mu, r#"{"a": 7, "b": 6, "c": 5, "d": 2}"#).unwrap();
    let o = dynn(&["track", "coords", &fixture("four_puncture_track.json"), "--measure", mu.to_str().unwrap(), "--format", "text"]);
    assert_eq!(stdout(&o), "(1/2, -1, 1, 3/2)");
    let _ = std::fs::remove_file(mu);
}

#[test]
fn batch_keeps_order() {
    let o = dynn(&["batch", &fixture("examples.braids"), "--jobs", "4"]);
    assert!(o.status.success());
    let recs: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 5);
    let lines: Vec<u64> = recs.iter().map(|r| r["line"].as_u64().unwrap()).collect();
    assert!(lines.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(recs[0]["matrices"][0]["matrix"], serde_json::json!([["2", "1"], ["1", "1"]]));
    let serial = dynn(&["batch", &fixture("examples.braids"), "--jobs", "1"]);
    assert_eq!(stdout(&serial), stdout(&o));
}
