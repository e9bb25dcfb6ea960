use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rkdec_core::barcode::SignedBarcode;
use rkdec_core::repro::{corner_interval, l_shape, staircase_upset};
use serde_json::Value;

fn rkdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rkdec")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn rkdec_outputs_the_corner_interval_barcode() {
    let dir = tempfile::tempdir().unwrap();
    let pres = write(dir.path(), "m.pres", &corner_interval(2).to_text());
    let text = stdout(&rkdec(&["rkdec", pres.to_str().unwrap()]));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["positive"].as_array().unwrap().len(), 3);
    assert_eq!(v["negative"].as_array().unwrap().len(), 2);
    assert_eq!(v["degrees"]["0"].as_array().unwrap().len(), 3);
    assert_eq!(v["degrees"]["1"].as_array().unwrap().len(), 2);
    assert_eq!(v["shape"], "hook");
}

#[test]
fn betti_of_a_staircase_upset() {
    let dir = tempfile::tempdir().unwrap();
    let pres = write(dir.path(), "u.pres", &staircase_upset(4, 2).to_text());
    let v: Value = serde_json::from_str(&stdout(&rkdec(&["betti", pres.to_str().unwrap()]))).unwrap();
    assert_eq!(v["sizes"], serde_json::json!([4, 3, 0]));
    assert_eq!(v["total"], 7);
}

#[test]
fn rectangle_decomposition_of_the_l_shape() {
    let dir = tempfile::tempdir().unwrap();
    let pres = write(dir.path(), "l.pres", &l_shape(2, 2., 10.).to_text());
    let text = stdout(&rkdec(&["mrd", "--shape", "rect", pres.to_str().unwrap()]));
    let sbc = SignedBarcode::from_json(&text).unwrap();
    assert_eq!((sbc.positive.len(), sbc.negative.len()), (2, 1));
}

#[test]
fn rank_invariant_and_upset_betti() {
    let dir = tempfile::tempdir().unwrap();
    let pres = write(dir.path(), "m.pres", &corner_interval(3).to_text());
    let v: Value = serde_json::from_str(&stdout(&rkdec(&["rank-inv", pres.to_str().unwrap()]))).unwrap();
    assert_eq!(v["ranks"].as_array().unwrap().len(), 5);
    let v: Value = serde_json::from_str(&stdout(&rkdec(&["upset-betti", pres.to_str().unwrap()]))).unwrap();
    assert_eq!(v["pdim"], 1);
}

#[test]
fn matching_a_file_with_itself_costs_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let pres = write(dir.path(), "m.pres", &corner_interval(2).to_text());
    let bars = dir.path().join("m.json");
    stdout(&rkdec(&["rkdec", pres.to_str().unwrap(), "--out", bars.to_str().unwrap()]));
    let v: Value = serde_json::from_str(&stdout(&rkdec(&["match", bars.to_str().unwrap(), bars.to_str().unwrap()]))).unwrap();
    assert_eq!(v["epsilon"], 0.0);
}

#[test]
fn plot_draws_one_segment_per_bar() {
    let dir = tempfile::tempdir().unwrap();
    let pres = write(dir.path(), "m.pres", &corner_interval(2).to_text());
    let bars = dir.path().join("m.json");
    stdout(&rkdec(&["rkdec", pres.to_str().unwrap(), "--out", bars.to_str().unwrap()]));
    let svg = stdout(&rkdec(&["plot", bars.to_str().unwrap()]));
    assert_eq!(svg.matches("class=\"bar positive\"").count(), 3);
    assert_eq!(svg.matches("class=\"bar negative\"").count(), 2);
    assert_eq!(svg.matches("#1f5fbf").count(), 6);

    let empty = write(dir.path(), "e.json", r#"{"version":1,"n":2,"p":2,"shape":"hook","positive":[],"negative":[]}"#);
    let svg = stdout(&rkdec(&["plot", empty.to_str().unwrap()]));
    assert_eq!(svg.matches("class=\"axis\"").count(), 2);
    assert!(!svg.contains("class=\"bar"));

    let free = write(dir.path(), "f.json", r#"{"version":1,"n":2,"p":2,"shape":"hook","positive":[{"i":[1,1],"j":"inf"}],"negative":[]}"#);
    let svg = stdout(&rkdec(&["plot", free.to_str().unwrap()]));
    assert_eq!(svg.matches("class=\"bar positive\"").count(), 1);
    assert!(svg.contains("stroke-dasharray"));

    let one = write(dir.path(), "one.json", r#"{"version":1,"n":1,"p":2,"shape":"hook","positive":[],"negative":[]}"#);
    assert_eq!(rkdec(&["plot", one.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.pres", "rkdec-presentation v1\nn=2 p=4\n");
    assert_eq!(rkdec(&["rkdec", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(rkdec(&["rkdec", "/definitely/missing.pres"]).status.code(), Some(2));
    let pres = write(dir.path(), "m.pres", &corner_interval(2).to_text());
    assert_eq!(rkdec(&["rkdec", "--field", "3", pres.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(rkdec(&["rkdec", "--max-depth", "0", pres.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(rkdec(&["repro", "staircase", "--k", "99"]).status.code(), Some(2));
    assert_eq!(rkdec(&["repro", "unknown"]).status.code(), Some(2));
    let hook = write(dir.path(), "h.json", r#"{"version":1,"n":2,"p":2,"shape":"hook","positive":[],"negative":[]}"#);
    let rect = write(dir.path(), "r.json", r#"{"version":1,"n":2,"p":2,"shape":"rect","positive":[],"negative":[]}"#);
    assert_eq!(rkdec(&["match", hook.to_str().unwrap(), rect.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn repro_reports_are_reproducible() {
    let args = ["repro", "stability-sweep", "--instances", "9", "--seed", "3"];
    let a = stdout(&rkdec(&args));
    let b = stdout(&rkdec(&args));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["prng"], "ChaCha8Rng");
    assert_eq!(v["seed"], 3);
    let v: Value = serde_json::from_str(&stdout(&rkdec(&["repro", "staircase", "--k", "2,3"]))).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
}
