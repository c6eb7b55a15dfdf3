//! End-to-end tests of the command-line interface: exit-code contract,
//! canonical report output, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lipgeo")
}

fn workdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lipgeo-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn cycle235() -> Value {
    json!({"vertices":["a","b","c"],"edges":[
        {"id":"e1","ends":["a","b"],"beta":"2"},
        {"id":"e2","ends":["b","c"],"beta":"3"},
        {"id":"e3","ends":["c","a"],"beta":"5"}]})
}

fn cycle2789() -> Value {
    json!({"vertices":["w","x","y","z"],"edges":[
        {"id":"f1","ends":["w","x"],"beta":"2"},
        {"id":"f2","ends":["x","y"],"beta":"7"},
        {"id":"f3","ends":["y","z"],"beta":"9"},
        {"id":"f4","ends":["z","w"],"beta":"11"}]})
}

fn absdiff() -> Value {
    json!({"op":"abs","arg":{"op":"sub","args":[
        {"op":"mono","c":"1","pu":"0","pw":"1"},
        {"op":"mono","c":"1","pu":"2","pw":"0"}]}})
}

#[test]
fn compare_inner_exit_codes_and_witness() {
    let dir = workdir();
    let a = write(&dir, "c235.json", &cycle235());
    let b = write(&dir, "c2789.json", &cycle2789());
    let out = run(&["compare-inner", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v = stdout_json(&out);
    assert_eq!(v["result"]["equivalent"], json!(true));
    assert!(v["result"]["witness"].is_object());

    // different horn exponents are inequivalent: exit 1
    let c = write(
        &dir,
        "edge3.json",
        &json!({"vertices":["x","y"],"edges":[{"id":"g","ends":["x","y"],"beta":"3"}]}),
    );
    let d = write(
        &dir,
        "edge2.json",
        &json!({"vertices":["x","y"],"edges":[{"id":"g","ends":["x","y"],"beta":"2"}]}),
    );
    let out = run(&["compare-inner", c.to_str().unwrap(), d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_deterministic() {
    let dir = workdir();
    let a = write(&dir, "det235.json", &cycle235());
    let b = write(&dir, "det2789.json", &cycle2789());
    let o1 = run(&["compare-inner", a.to_str().unwrap(), b.to_str().unwrap()]);
    let o2 = run(&["compare-inner", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(o1.stdout, o2.stdout);
}

#[test]
fn pizza_extract_and_compare() {
    let dir = workdir();
    let f = write(&dir, "absdiff.json", &absdiff());
    let out = run(&["pizza-extract", f.to_str().unwrap(), "--beta", "1/1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let pizza = v["result"]["pizza"].clone();
    assert_eq!(pizza["slices"].as_array().unwrap().len(), 2);
    assert_eq!(pizza["slices"][0]["q_in"], json!("2"));
    assert_eq!(pizza["slices"][0]["q_out"], json!("inf"));

    // emitted pizzas re-parse and compare equal to themselves
    let p1 = write(&dir, "p1.json", &pizza);
    let out = run(&["pizza-compare", p1.to_str().unwrap(), p1.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // reversal: unequal oriented, equal unoriented
    let mut rev = pizza.clone();
    let slices: Vec<Value> = pizza["slices"]
        .as_array()
        .unwrap()
        .iter()
        .rev()
        .map(|s| {
            json!({
                "q_in": s["q_out"], "q_out": s["q_in"],
                "beta": s["beta"], "mu": s["mu"],
            })
        })
        .collect();
    rev["slices"] = Value::Array(slices);
    let p2 = write(&dir, "p2.json", &rev);
    let out = run(&["pizza-compare", p1.to_str().unwrap(), p2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "pizza-compare",
        p1.to_str().unwrap(),
        p2.to_str().unwrap(),
        "--unoriented",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_cusp_flags_the_witness_pair() {
    let dir = workdir();
    let cusp = lipgeo::metriclab::cusp_pair_model();
    let model = write(&dir, "cusp.json", &lipgeo::json::model_to_json(&cusp));
    let arcs = lipgeo::json::arc_family_to_json(
        &lipgeo::exponents::ArcFamily::new(vec![
            cusp.patches[0].arc_at(&num_rational::BigRational::from_integer(0.into())).unwrap(),
            cusp.patches[1].arc_at(&num_rational::BigRational::from_integer(0.into())).unwrap(),
        ])
        .unwrap(),
    );
    let arcs = write(&dir, "branches.json", &arcs);
    let out = run(&[
        "verify",
        model.to_str().unwrap(),
        "--arcs",
        arcs.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["violations"], json!(1));
    let pair = &v["result"]["pairs"][0];
    let outer = pair["outer"]["Estimate"]["exponent"].as_f64().unwrap();
    let inner = pair["inner"]["Estimate"]["exponent"].as_f64().unwrap();
    assert!((outer - 1.5).abs() < 0.05, "outer {outer}");
    assert!((inner - 1.0).abs() < 0.05, "inner {inner}");
}

#[test]
fn input_errors_exit_2() {
    let dir = workdir();
    let bad = dir.join("nope.json");
    let out = run(&["horn", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let garbled = write(&dir, "garbled.json", &json!({"vertices": 3}));
    let out = run(&["canonicalize", garbled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // horn of a non-cycle is an input error
    let path = write(
        &dir,
        "path.json",
        &json!({"vertices":["a","b","c"],"edges":[
            {"id":"e1","ends":["a","b"],"beta":"2"},
            {"id":"e2","ends":["b","c"],"beta":"3"}]}),
    );
    let out = run(&["horn", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dot_and_svg_formats() {
    let dir = workdir();
    let a = write(&dir, "dotc.json", &cycle235());
    let out = run(&["canonicalize", a.to_str().unwrap(), "--format", "dot"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph holder {"));
    assert!(text.contains("label=\"2\""));

    let out = run(&[
        "realize",
        a.to_str().unwrap(),
        "--format",
        "svg",
        "--resolution",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains("polyline"));
}

#[test]
fn tord_table() {
    let dir = workdir();
    let arcs = json!({"arcs": [
        {"param": "coordinate", "coords": [[{"exp":"1","c":"1"}], [{"exp":"2","c":"1"}]]},
        {"param": "coordinate", "coords": [[{"exp":"1","c":"1"}], [{"exp":"2","c":"2"}]]},
        {"param": "coordinate", "coords": [[{"exp":"1","c":"1"}], [{"exp":"3/2","c":"1"}]]}
    ]});
    let f = write(&dir, "arcs.json", &arcs);
    let out = run(&["tord", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let pairs = v["result"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    assert_eq!(pairs[0]["tord"], json!("2"));
    assert_eq!(pairs[1]["tord"], json!("3/2"));
}

#[test]
fn output_flag_writes_file() {
    let dir = workdir();
    let a = write(&dir, "outc.json", &cycle235());
    let target = dir.join("report.json");
    let out = run(&[
        "horn",
        a.to_str().unwrap(),
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["result"]["exponent"], json!("2"));
}
