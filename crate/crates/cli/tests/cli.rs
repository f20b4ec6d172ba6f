use std::path::Path;
use std::process::{Command, Output};

use freearr::intermediate::{build_intermediate, Label};
use freearr::io::ArrangementFile;
use serde_json::Value;

fn freearr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freearr")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture_path(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name).to_string_lossy().into_owned()
}

#[test]
fn g2_height_partition_certifies() {
    let out = freearr(&["mat", "certify", "--type", "G2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["certificate"]["exponents"], serde_json::json!([1, 5]));
}

#[test]
fn fixture_g_is_not_accurate() {
    let out = freearr(&["accuracy", "check", "--fixture", "G"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "not_accurate");
    let missing: Vec<&Value> = v["dimensions"].as_array().unwrap().iter().filter(|d| d["witness"].is_null()).collect();
    assert_eq!(missing.len(), 1);
    assert_eq!(missing[0]["d"], 9);
}

#[test]
fn fixture_g_has_18_edges() {
    let out = freearr(&["graph", "fixture", "--which", "G"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n"], 10);
    assert_eq!(v["edges"].as_array().unwrap().len(), 18);
}

#[test]
fn cap_exceeded_exits_3() {
    let out = freearr(&["arr", "charpoly", "--type", "A4", "--max-flats", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out)["cap_error"].is_string());
}

#[test]
fn errors_exit_2() {
    let out = freearr(&["weyl", "build", "--type", "Q3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

fn round_trip(file: &ArrangementFile) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    std::fs::write(&path, serde_json::to_string(file).unwrap()).unwrap();
    // Restriction to the whole space re-emits the arrangement unchanged.
    let out = freearr(&["arr", "restrict", "--file", path.to_str().unwrap(), "--hyperplanes", ""]);
    assert_eq!(out.status.code(), Some(0));
    let back: ArrangementFile = serde_json::from_value(json(&out)["arrangement"].clone()).unwrap();
    assert_eq!(&back, file);
    assert_eq!(back.to_arrangement().unwrap(), file.to_arrangement().unwrap());
}

#[test]
fn arrangement_files_round_trip() {
    let out = freearr(&["weyl", "build", "--type", "B3"]);
    let file: ArrangementFile = serde_json::from_value(json(&out)["arrangement"].clone()).unwrap();
    assert_eq!(file.hyperplanes.len(), 9);
    round_trip(&file);
    round_trip(&ArrangementFile::from_arrangement(&build_intermediate(Label::new(3, 3, 1).unwrap())));
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let d = fixture_path("example_D.txt");
    let runs: Vec<Vec<u8>> = ["1", "4", "4"]
        .iter()
        .map(|t| freearr(&["--threads", t, "accuracy", "check", "--forms", &d, "--strategy", "exhaustive"]).stdout)
        .collect();
    assert!(!runs[0].is_empty());
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let v: Value = serde_json::from_slice(&runs[0]).unwrap();
    assert_eq!(v["verdict"], "accurate");
    assert_eq!(v["exponents"], serde_json::json!([1, 5, 5, 5, 5]));
}

#[test]
fn intermediate_check_matches_closed_form() {
    let out = freearr(&["inter", "check", "--l", "5", "--r", "3", "--k", "1", "--both"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["accurate"], false);
    assert_eq!(v["closed_form"], false);
    let out = freearr(&["inter", "check", "--l", "4", "--r", "3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn catalan_pipeline() {
    let out = freearr(&["deform", "witnesses", "--type", "B2", "--k", "1", "--family", "catalan"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exponents"], serde_json::json!([1, 5, 7]));
    assert_eq!(v["verdict"], "accurate");
}
