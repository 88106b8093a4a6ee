use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitforge")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn green_trace_csv_rows() {
    let o = run(&["green", "trace", "--poly", "[−1,0,1]", "--r", "1", "--n", "16", "--out", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,re,im,g_residual"));
    assert_eq!(lines.count(), 16);
}

#[test]
fn green_trace_svg_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("level.svg");
    let o = run(&["green", "trace", "--poly", "[-1,0,1]", "--r", "1/2", "--n", "32", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(json(&o)["points"], 32);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.contains("<polyline"));
    assert!(svg.contains(r#"viewBox="-2 -2 4 4""#));
}

#[test]
fn box_sweep_passes() {
    let o = run(&["combinat", "verify", "--lemma", "box1", "--nmax", "60"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 44);
}

#[test]
fn small_orbit_level_two() {
    let o = run(&["orbit", "small", "--poly", "[−1,0,1]", "--alpha", "1/3", "--level", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["size"], 4);
    let roots: Vec<&str> = v["rational"].as_array().unwrap().iter().map(|r| r["root"].as_str().unwrap()).collect();
    assert_eq!(roots, ["-1/3", "1/3"]);
    let f = &v["factors"][0];
    assert_eq!(f["poly"], serde_json::json!(["-17/9", "0/1", "1/1"]));
    for b in f["roots"].as_array().unwrap() {
        let re = b["re"].as_f64().unwrap().abs();
        assert!((re - 17f64.sqrt() / 3.0).abs() <= b["rad"].as_f64().unwrap() + 1e-15);
    }
    assert_eq!(v["verified"], true);
}

#[test]
fn boettcher_power_map() {
    let v = json(&run(&["boettcher", "--poly", "[0,0,0,1]", "--order", "10"]));
    let c = v["coefficients"].as_array().unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c[0]["exponent"], -1);
    assert_eq!(c[0]["coeff"], "1/1");
}

#[test]
fn padic_ledger() {
    let v = json(&run(&["padic", "polygon", "--p", "3", "--series", r#"["9","3","1"]"#, "--pj", "--r1", "1/9", "--r", "3"]));
    assert_eq!(v["pj"]["residual"], "0/1");
    assert_eq!(v["zeros"][0]["count"], 2);
}

#[test]
fn usage_error_is_exit_two() {
    let o = run(&["orbit", "small", "--poly", "[0,0,1]"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"]["code"], "usage");
    let o = run(&["orbit", "small", "--poly", "[0,0,oops]", "--alpha", "1", "--level", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"]["code"], "parse");
}

#[test]
fn domain_error_is_exit_one() {
    let o = run(&["orbit", "height", "--poly", "[1,0,2]", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"]["code"], "domain");
    let o = run(&["combinat", "box", "--a1", "1", "--a2", "0", "--n", "16"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["error"]["message"].as_str().unwrap().contains("N >= 17"));
}

#[test]
fn manifest_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("run.json");
    let first = run(&["--manifest-out", m.to_str().unwrap(), "orbit", "height", "--poly", "[-1,0,1]", "--alpha", "1/3", "--tol", "1e-10"]);
    assert!(first.status.success());
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "orbit");
    assert!(manifest["wall_time_ms"].is_u64());
    let again = run(&["replay", m.to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(first.stdout, again.stdout);
}

#[test]
fn config_sets_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("of.toml");
    std::fs::write(&cfg, "truncation = 5\nprecision = 1e-9\n").unwrap();
    let v = json(&run(&["--config", cfg.to_str().unwrap(), "boettcher", "--poly", "[-1,0,1]"]));
    assert_eq!(v["order"], 5);
    assert_eq!(v["unknown_from_exponent"], 5);
    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "boettcher", "--poly", "[-1,0,1]"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn curve_commands() {
    let v = json(&run(&["curve", "special", "--poly", "[-1,0,1]", "--curve", "[[0,-1],[1]]", "--alpha", "1/3"]));
    assert_eq!(v["special"], true);
    let v = json(&run(&["curve", "intersect", "--poly", "[-1,0,1]", "--curve", "[[0,-1],[1]]", "--alpha", "1/3", "--cap", "2"]));
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    let v = json(&run(&[
        "curve", "nu", "--poly", "[0,0,1]", "--curve", "[[0,-1],[1]]", "--p", "3", "--phi", "3", "--k1", "1", "--k2", "-1", "--window", "10",
    ]));
    assert_eq!(v["ledger"]["kappa_check"]["holds"], true);
}

#[test]
fn classify_reports_conjugate() {
    let v = json(&run(&["dynamics", "classify", "--poly", "[-1,0,3]", "--alpha", "1/3"]));
    assert_eq!(v["monic"], serde_json::json!(["-3/1", "0/1", "1/1"]));
    assert_eq!(v["alpha"]["orbit"]["verdict"], "wandering");
    let v = json(&run(&["dynamics", "classify", "--poly", "[-2,0,1]"]));
    assert_eq!(v["exceptional"]["kind"], "chebyshev");
}
