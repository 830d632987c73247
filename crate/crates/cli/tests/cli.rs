use std::process::{Command, Output};

use serde_json::Value;

fn jetg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetg"))
        .args(args)
        .env_remove("JETG_STEP")
        .env_remove("JETG_TOL")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json output")
}

const X_PLUS_X2: &str = r#"{"dim":1,"components":[{"nvars":1,"terms":{"1":"1","2":"1"}}]}"#;

#[test]
fn compose_quadratic_jets() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let a = a.to_str().unwrap();
    let o = jetg(&["jet", "taylor", X_PLUS_X2, "--at", "0", "--k", "2", "--out", a]);
    assert!(o.status.success());
    let c = stdout_json(&jetg(&["jet", "compose", a, a]));
    assert_eq!(c["coeffs"]["1"][0], "1/1");
    assert_eq!(c["coeffs"]["2"][0], "2/1");
    assert_eq!(c["value"][0], "0/1");
}

#[test]
fn inverse_of_2x_plus_x2() {
    let map = r#"{"dim":1,"components":[{"nvars":1,"terms":{"1":"2","2":"1"}}]}"#;
    let j = stdout_json(&jetg(&["jet", "taylor", map, "--at", "0", "--k", "2"]));
    let inv = stdout_json(&jetg(&["jet", "invert", &j.to_string()]));
    assert_eq!(inv["coeffs"]["1"][0], "1/2");
    assert_eq!(inv["coeffs"]["2"][0], "-1/8");
}

#[test]
fn non_composable_jets_exit_1() {
    let a = stdout_json(&jetg(&["jet", "taylor", X_PLUS_X2, "--at", "0", "--k", "2"]));
    let b = stdout_json(&jetg(&["jet", "taylor", X_PLUS_X2, "--at", "1", "--k", "2"]));
    let o = jetg(&["jet", "compose", &a.to_string(), &b.to_string()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("non-composable: α(g) ≠ β(h)"));
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(jetg(&["jet", "invert", "{\"n\": 1"]).status.code(), Some(2));
    assert_eq!(jetg(&["jet", "invert", "/no/such/file.json"]).status.code(), Some(2));
    let bad_key = r#"{"dim":1,"components":[{"nvars":1,"terms":{"1,1":"1"}}]}"#;
    assert_eq!(jetg(&["jet", "taylor", bad_key, "--at", "0", "--k", "1"]).status.code(), Some(2));
    assert_eq!(jetg(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn non_normal_quotient_exits_1_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("s3.json");
    let g = g.to_str().unwrap();
    assert!(jetg(&["groupoid", "trivial", "--dim", "1", "--group", "s3", "--out", g]).status.success());
    // {e, (12)} is not normal in S3.
    let o = jetg(&["groupoid", "quotient", g, r#"{"members":[0,3]}"#]);
    assert_eq!(o.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("non-normal") && msg.contains("γ ="), "{msg}");
    let n = stdout_json(&jetg(&["groupoid", "normal", g, r#"{"members":[0,3]}"#]));
    assert_eq!(n["normal"], false);
    assert!(n["witness"].is_object());
}

#[test]
fn quotient_of_s3_by_a3() {
    let g = stdout_json(&jetg(&["groupoid", "trivial", "--dim", "3", "--group", "s3"]));
    // ids (y*6 + h)*3 + x with h in A3 = {0, 1, 2}
    let members: Vec<u64> = (0..3u64)
        .flat_map(|y| (0..3u64).flat_map(move |h| (0..3u64).map(move |x| (y * 6 + h) * 3 + x)))
        .collect();
    let sigma = serde_json::json!({ "members": members }).to_string();
    let q = stdout_json(&jetg(&["groupoid", "quotient", &g.to_string(), &sigma]));
    assert_eq!(q["arrows"].as_array().unwrap().len(), 18);
    let check = stdout_json(&jetg(&["groupoid", "check", &q.to_string()]));
    assert_eq!(check["ok"], true);
    let comps = stdout_json(&jetg(&["groupoid", "components", &q.to_string()]));
    assert_eq!(comps["components"][0]["isotropy_orders"][0], 2);
}

#[test]
fn broken_table_reports_violations() {
    let mut g = stdout_json(&jetg(&["groupoid", "pair", "--dim", "2"]));
    let comp = g["comp"].as_array_mut().unwrap();
    let i = comp
        .iter()
        .position(|e| e[0] != e[2] && e[1] != e[2])
        .unwrap_or(0);
    comp[i][2] = comp[i][0].clone();
    let o = jetg(&["groupoid", "check", &g.to_string()]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn algebroid_bracket_of_translation_and_scaling() {
    let dx = r#"{"kind":"trivial_section","theta":{"dim":1,"components":[{"nvars":1,"terms":{"0":"1"}}]},"h":{"nvars":1,"size":1,"coeffs":{}}}"#;
    let xdx = r#"{"kind":"trivial_section","theta":{"dim":1,"components":[{"nvars":1,"terms":{"1":"1"}}]},"h":{"nvars":1,"size":1,"coeffs":{}}}"#;
    let b = stdout_json(&jetg(&["algebroid", "bracket", dx, xdx]));
    assert_eq!(b["theta"]["components"][0]["terms"]["0"], "1/1");
    let anti = stdout_json(&jetg(&["algebroid", "bracket", xdx, dx]));
    assert_eq!(anti["theta"]["components"][0]["terms"]["0"], "-1/1");
}

#[test]
fn linop_example() {
    // θ = ∂x, h = x, s = x²: δ(s) = −x·x² + 2x
    let op = r#"{"kind":"linear_operator","theta":{"dim":1,"components":[{"nvars":1,"terms":{"0":"1"}}]},"h":{"nvars":1,"size":1,"coeffs":{"1":[["1"]]}}}"#;
    let s = r#"{"kind":"vector_section","nvars":1,"components":[{"nvars":1,"terms":{"2":"1"}}]}"#;
    let r = stdout_json(&jetg(&["linop", "apply", op, s]));
    let terms = &r["components"][0]["terms"];
    assert_eq!(terms["3"], "-1/1");
    assert_eq!(terms["1"], "2/1");
}

#[test]
fn flows_and_blow_up() {
    let xdx = r#"{"dim":1,"components":[{"nvars":1,"terms":{"1":"1"}}]}"#;
    let p = stdout_json(&jetg(&["flow", "field", xdx, "--at", "1", "--t", "1"]));
    assert!((p["point"][0].as_f64().unwrap() - std::f64::consts::E).abs() < 1e-8);
    let x2 = r#"{"dim":1,"components":[{"nvars":1,"terms":{"2":"1"}}]}"#;
    let o = jetg(&["flow", "field", x2, "--at", "1", "--t", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("blow-up"));
}

#[test]
fn path_csv_and_env_step() {
    let xi = r#"{"kind":"trivial_section","theta":{"dim":1,"components":[{"nvars":1,"terms":{"1":"1"}}]},"h":{"nvars":1,"size":1,"coeffs":{"0":[["1/2"]]}}}"#;
    let o = Command::new(env!("CARGO_BIN_EXE_jetg"))
        .args(["flow", "path", xi, "--at", "1", "--t", "1", "--samples", "3", "--csv"])
        .env("JETG_STEP", "0.01")
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x0,g00");
    assert_eq!(lines.len(), 4);
    let last: Vec<f64> = lines[3].split(',').map(|c| c.parse().unwrap()).collect();
    assert!((last[1] - std::f64::consts::E).abs() < 1e-8);
    assert!((last[2] - 0.5f64.exp()).abs() < 1e-8);
    let bad = Command::new(env!("CARGO_BIN_EXE_jetg"))
        .args(["flow", "path", xi, "--at", "1", "--t", "1"])
        .env("JETG_STEP", "-1")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn outputs_round_trip_through_the_cli() {
    let j = stdout_json(&jetg(&["jet", "taylor", X_PLUS_X2, "--at", "1/3", "--k", "3"]));
    let p = stdout_json(&jetg(&["jet", "project", &j.to_string(), "--k", "3"]));
    assert_eq!(j, p);
    let g = stdout_json(&jetg(&["groupoid", "trivial", "--dim", "2", "--group", "d4"]));
    // the unit subgroupoid: ids (y*8 + 0)*2 + y
    let q = stdout_json(&jetg(&["groupoid", "quotient", &g.to_string(), r#"{"members":[0,17]}"#]));
    assert_eq!(q["arrows"].as_array().unwrap().len(), 32);
    let xi = r#"{"kind":"jet_section","n":1,"k":2,"terms":[{"f":{"nvars":1,"terms":{"1":"1/2"}},"mu":{"dim":1,"components":[{"nvars":1,"terms":{"2":"-3"}}]}}]}"#;
    let anchor = stdout_json(&jetg(&["algebroid", "anchor", xi]));
    assert_eq!(anchor["components"][0]["terms"]["3"], "-3/2");
}

#[test]
fn verify_is_deterministic() {
    let a = jetg(&["verify", "quotients", "--seed", "7"]);
    let b = jetg(&["verify", "quotients", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("PASS")));
}

#[test]
fn verify_all_with_seed_42_passes() {
    let o = jetg(&["verify", "all", "--seed", "42"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert!(!text.lines().any(|l| l.starts_with("FAIL")));
}
