use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn mumford(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mumford")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = mumford(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, v: Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn tate3(dir: &TempDir) -> PathBuf {
    let out = mumford(&["--prime", "5", "tate-graph", "--m", "3"]);
    assert!(out.status.success());
    let path = dir.path().join("tate3.json");
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

#[test]
fn phi_check_unit_rep() {
    let dir = TempDir::new().unwrap();
    let g = tate3(&dir);
    let rep = write(&dir, "unit.json", json!({"p": 5, "rank": 1, "generators": [[[1]]]}));
    let r = report(&["phi-check", "--graph", s(&g), "--rep", s(&rep), "--depth", "8"]);
    assert_eq!(r["verdict"], "PhiBounded");
    assert_eq!(r["certificate"], "integral");
    assert_eq!(r["schema_version"], 1);
}

#[test]
fn phi_check_refutes_large_power() {
    let dir = TempDir::new().unwrap();
    let g = tate3(&dir);
    let rep = write(&dir, "big.json", json!({"p": 5, "rank": 1, "generators": [[["p^3"]]]}));
    let r = report(&["phi-check", "--graph", s(&g), "--rep", s(&rep)]);
    assert_eq!(r["verdict"], "NotPhiBounded", "{r}");
}

#[test]
fn cover_mod5() {
    let dir = TempDir::new().unwrap();
    let g = tate3(&dir);
    let rep = write(&dir, "mod5.json", json!({"p": 5, "rank": 1, "generators": [[[2]]]}));
    let r = report(&["cover", "--rep", s(&rep), "--level", "1", "--graph", s(&g)]);
    assert_eq!(r["group_order"], 4);
    assert_eq!(r["kernel_rank"], 1);
    assert_eq!(r["genus"], 1);
    assert_eq!(r["voltage_cover"]["betti_number"], 1);
}

#[test]
fn rcf_identity() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "id2.json", json!({"p": 5, "matrix": [[1, 0], [0, 1]]}));
    let r = report(&["rcf", "--matrix", s(&m)]);
    assert_eq!(r["invariant_factors"], json!(["X-1", "X-1"]));
    assert_eq!(r["canonical"], json!([["1", "0"], ["0", "1"]]));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "id2.json", json!({"p": 5, "matrix": [[1, 0], [0, 1]]}));
    assert_eq!(mumford(&["--prime", "3", "rcf", "--matrix", s(&m)]).status.code(), Some(2));
    let bad = write(&dir, "bad.json", json!({"p": 4, "matrix": [[1]]}));
    assert_eq!(mumford(&["rcf", "--matrix", s(&bad)]).status.code(), Some(2));
    assert_eq!(mumford(&["rcf", "--matrix", "/nonexistent/x.json"]).status.code(), Some(2));
    let rep = write(&dir, "r.json", json!({"p": 5, "rank": 2, "generators": [[[2, 1], [0, 1]], [[1, 0], [1, 1]]]}));
    let out = mumford(&["cover", "--rep", s(&rep), "--level", "2", "--guard", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let g = tate3(&dir);
    let unit = write(&dir, "u.json", json!({"p": 5, "rank": 1, "generators": [[[1]]]}));
    let out = mumford(&["phi-check", "--graph", s(&g), "--rep", s(&unit), "--depth", "30", "--guard", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn emitted_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let g = tate3(&dir);
    let oriented = report(&["orient", "--graph", s(&g)]);
    let g2 = write(&dir, "g2.json", oriented["graph"].clone());
    let again = report(&["orient", "--graph", s(&g2)]);
    assert_eq!(again["graph"], oriented["graph"]);

    let rep = write(&dir, "r.json", json!({"p": 3, "rank": 2, "generators": [[[1, "1/3"], [0, 2]]]}));
    let dual = report(&["dual", "--rep", s(&rep)]);
    let d = write(&dir, "d.json", dual.clone());
    let back = report(&["dual", "--rep", s(&d)]);
    let orig = write(&dir, "o.json", back.clone());
    assert_eq!(report(&["dual", "--rep", s(&orig)]), dual);
    let iso = report(&["iso-check", "--left", s(&rep), "--right", s(&orig)]);
    assert_eq!(iso["verdict"], "Isomorphic");
}

#[test]
fn deterministic_output() {
    let dir = TempDir::new().unwrap();
    let rep = write(&dir, "r.json", json!({"p": 3, "rank": 2, "generators": [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]}));
    let out = dir.path().join("a.json");
    let args = ["--out", s(&out), "dw-compare", "--rep", s(&rep), "--level", "1", "--basepoint", "5"];
    assert!(mumford(&args).status.success());
    let first = std::fs::read(&out).unwrap();
    assert!(mumford(&args).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), first);
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["module_consistent"], true);
}

#[test]
fn tensor_and_sum_shapes() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", json!({"p": 5, "rank": 2, "generators": [[[2, 1], [0, 1]]]}));
    let b = write(&dir, "b.json", json!({"p": 5, "rank": 1, "generators": [[[3]]]}));
    let c = write(&dir, "c.json", json!({"p": 5, "rank": 1, "generators": [[[2]]]}));
    assert_eq!(report(&["tensor", "--left", s(&a), "--right", s(&b)])["rank"], 2);
    assert_eq!(report(&["dsum", "--left", s(&a), "--right", s(&b)])["rank"], 3);
    let iso = report(&["iso-check", "--left", s(&b), "--right", s(&c)]);
    assert_eq!(iso["verdict"], "NotIsomorphic");
}

#[test]
fn schottky_and_pairs() {
    let dir = TempDir::new().unwrap();
    let gens = write(
        &dir,
        "s.json",
        json!({
            "p": 3,
            "generators": [[["p^2", 0], [0, 1]]],
            "balls": [{"minus": {"center": 0, "radius_exp": 1, "complement": true}, "plus": {"center": 0, "radius_exp": 2}}]
        }),
    );
    let r = report(&["schottky-check", "--generators", s(&gens)]);
    assert_eq!(r["verdict"], "GoodPosition", "{r}");
    assert_eq!(r["classifications"][0], json!({"type": "Hyperbolic", "translation_length": 2}), "{r}");
    let pair = write(&dir, "p.json", json!({"p": 5, "a": [[1, 0], [0, 2]], "b": [[1, 1], [1, 2]]}));
    let r = report(&["pair-classify", "--pair", s(&pair)]);
    assert!(r["c"].is_string(), "{r}");
}
