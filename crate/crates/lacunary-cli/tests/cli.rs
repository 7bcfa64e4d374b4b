use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lacunary"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const SQUARE: &str = r#"{"terms":[{"exp":"4","num":"1","den":"1"},{"exp":"3","num":"2","den":"1"},{"exp":"2","num":"1","den":"1"}]}"#;

#[test]
fn decompose_square_reports_proper() {
    let out = run(&["decompose", "--inline", SQUARE]);
    let doc = stdout_json(&out);
    assert_eq!(doc["degree"], "4");
    assert_eq!(doc["has_proper"], true);
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["kind"], "proper");
    assert_eq!(results[0]["divisor"], 2);
    // inner is x^2 + x
    let inner = &results[0]["inner"]["terms"];
    assert_eq!(inner[0]["exp"], "2");
    assert_eq!(inner[1]["exp"], "1");
    // outer is x^2
    let outer = results[0]["outer"].as_array().unwrap();
    assert_eq!(outer.len(), 3);
    assert_eq!(outer[2]["num"], "1");
}

#[test]
fn decompose_monomial_with_shift() {
    let inline = r#"{"terms":[{"exp":"10","num":"1","den":"1"},{"exp":"0","num":"3","den":"1"}]}"#;
    let out = run(&["decompose", "--inline", inline]);
    let doc = stdout_json(&out);
    assert_eq!(doc["has_proper"], true);
    assert_eq!(doc["results"][0]["kind"], "trivial");
}

#[test]
fn decompose_output_is_deterministic() {
    let a = run(&["decompose", "--inline", SQUARE]);
    let b = run(&["decompose", "--inline", SQUARE]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn decompose_writes_output_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("decompose_out.json");
    let _ = std::fs::remove_file(&path);
    let piped = run(&["decompose", "--inline", SQUARE]);
    let out = run(&["decompose", "--inline", SQUARE, "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), piped.stdout);
}

#[test]
fn decompose_reads_input_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("decompose_in.json");
    std::fs::write(&path, SQUARE).unwrap();
    let from_file = run(&["decompose", "--input", path.to_str().unwrap()]);
    let inline = run(&["decompose", "--inline", SQUARE]);
    assert_eq!(stdout_json(&from_file), stdout_json(&inline));
}

#[test]
fn expand_square_root_series() {
    let inline = r#"{"poly":{"terms":[{"exp":"0","num":"1","den":"1"},{"exp":"1","num":"1","den":"1"}]},"s":1,"d":2,"order":4}"#;
    let out = run(&["expand", "--inline", inline]);
    let doc = stdout_json(&out);
    assert_eq!(doc["order"], 4);
    let terms = doc["terms"].as_array().unwrap();
    let coeffs: Vec<(String, String, String)> = terms
        .iter()
        .map(|t| {
            (
                t["exp"].as_str().unwrap().into(),
                t["num"].as_str().unwrap().into(),
                t["den"].as_str().unwrap().into(),
            )
        })
        .collect();
    assert_eq!(
        coeffs,
        vec![
            ("0".into(), "1".into(), "1".into()),
            ("1".into(), "1".into(), "2".into()),
            ("2".into(), "-1".into(), "8".into()),
            ("3".into(), "1".into(), "16".into()),
        ]
    );
}

#[test]
fn expand_negative_power() {
    // (1 + y)^(-1/1) = 1 - y + y^2 - ...
    let inline = r#"{"poly":{"terms":[{"exp":"0","num":"1","den":"1"},{"exp":"1","num":"1","den":"1"}]},"s":-1,"d":1,"order":3}"#;
    let doc = stdout_json(&run(&["expand", "--inline", inline]));
    let terms = doc["terms"].as_array().unwrap();
    assert_eq!(terms[1]["num"], "-1");
    assert_eq!(terms[2]["num"], "1");
}

#[test]
fn expand_budget_exhaustion_is_a_budget_error() {
    let inline = r#"{"poly":{"terms":[{"exp":"0","num":"1","den":"1"},{"exp":"1","num":"1","den":"1"}]},"s":1,"d":2,"order":64}"#;
    let out = run(&["expand", "--inline", inline, "--budget-terms", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "budget");
}

#[test]
fn wronskian_check_pair() {
    let inline = r#"{"functions":[{"num":{"terms":[{"exp":"0","num":"1","den":"1"}]}},{"num":{"terms":[{"exp":"1","num":"1","den":"1"}]}}],"r":2}"#;
    let doc = stdout_json(&run(&["wronskian-check", "--inline", inline]));
    assert_eq!(doc["functions"], 2);
    assert_eq!(doc["order_total"], -2);
    assert_eq!(doc["prop1"]["lhs"], 0);
    assert_eq!(doc["prop1"]["rhs"], 0);
    assert_eq!(doc["prop1"]["holds"], true);
}

#[test]
fn wronskian_check_rational_functions() {
    // (1/y, y): finite place (y) and infinity both carry order -1
    let inline = r#"{"functions":[{"num":{"terms":[{"exp":"0","num":"1","den":"1"}]},"den":{"terms":[{"exp":"1","num":"1","den":"1"}]}},{"num":{"terms":[{"exp":"1","num":"1","den":"1"}]}}]}"#;
    let doc = stdout_json(&run(&["wronskian-check", "--inline", inline]));
    assert_eq!(doc["order_total"], -2);
    assert_eq!(doc["prop1"], serde_json::Value::Null);
    let orders = doc["wronskian_orders"].as_array().unwrap();
    assert_eq!(orders.len(), 2);
    assert_eq!(orders[0]["place"], "(x)");
    assert_eq!(orders[0]["order"], -1);
    assert_eq!(orders[1]["place"], "infinity");
    assert_eq!(orders[1]["order"], -1);
}

#[test]
fn wronskian_check_explicit_places() {
    let inline = r#"{"functions":[{"num":{"terms":[{"exp":"1","num":"1","den":"1"}]}},{"num":{"terms":[{"exp":"0","num":"1","den":"1"},{"exp":"1","num":"-1","den":"1"}]}}],"r":2,"places":[{"kind":"infinite"},{"kind":"finite","poly":{"terms":[{"exp":"1","num":"1","den":"1"}]}},{"kind":"finite","poly":{"terms":[{"exp":"1","num":"1","den":"1"},{"exp":"0","num":"-1","den":"1"}]}}]}"#;
    let doc = stdout_json(&run(&["wronskian-check", "--inline", inline]));
    // sigma = y + (1 - y) = 1; the bound is tight here
    assert_eq!(doc["prop1"]["lhs"], 1);
    assert_eq!(doc["prop1"]["rhs"], 1);
    assert_eq!(doc["prop1"]["holds"], true);
}

#[test]
fn wronskian_places_without_r_is_rejected() {
    let inline = r#"{"functions":[{"num":{"terms":[{"exp":"1","num":"1","den":"1"}]}}],"places":[{"kind":"infinite"}]}"#;
    let out = run(&["wronskian-check", "--inline", inline]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid_input");
}

#[test]
fn enumerate_default_catalog() {
    let doc = stdout_json(&run(&["enumerate"]));
    assert_eq!(doc["shape"]["l"], 1);
    assert_eq!(doc["shape"]["ell"], 2);
    assert_eq!(doc["shape"]["b_count"], 1);
    assert_eq!(doc["variables"], serde_json::json!(["m1", "n1_1", "n2_1"]));
    assert_eq!(doc["terms"].as_array().unwrap().len(), 4);
    // the square family partition must be present
    let square = serde_json::json!([[0, 3], [1], [2]]);
    assert!(doc["entries"]
        .as_array()
        .unwrap()
        .iter()
        .any(|e| e["partition"] == square));
}

#[test]
fn enumerate_is_deterministic() {
    let a = run(&["enumerate", "--cap-l", "2", "--cap-ell", "2", "--cap-b", "1"]);
    let b = run(&["enumerate", "--cap-l", "2", "--cap-ell", "2", "--cap-b", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn enumerate_size_guard() {
    let out = run(&["enumerate", "--cap-l", "2", "--cap-ell", "3", "--cap-b", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "size_guard");
}

#[test]
fn enumerate_rejects_out_of_range_shape() {
    let out = run(&["enumerate", "--cap-l", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corollary_scan_box_six() {
    let inline = r#"{"coeffs":[{"num":"1","den":"1"},{"num":"2","den":"1"},{"num":"1","den":"1"}]}"#;
    let doc = stdout_json(&run(&["corollary-scan", "--inline", inline, "--box", "6"]));
    assert_eq!(doc["total"], 20);
    assert_eq!(doc["decomposable_count"], 3);
    let rows = doc["rows"].as_array().unwrap();
    let hits: Vec<Vec<u64>> = rows
        .iter()
        .filter(|r| r["decomposable"] == true)
        .map(|r| {
            r["exponents"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_u64().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(hits, vec![vec![4, 3, 2], vec![6, 4, 2], vec![6, 5, 4]]);
}

#[test]
fn malformed_json_is_reported_as_json_error() {
    let out = run(&["decompose", "--inline", "not json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "json");
    assert!(err["error"]["message"].as_str().unwrap().len() > 0);
}

#[test]
fn unknown_fields_are_rejected() {
    let out = run(&[
        "decompose",
        "--inline",
        r#"{"terms":[],"extra":1}"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "json");
}

#[test]
fn plain_text_errors_on_request() {
    let out = run(&["decompose", "--inline", "not json", "--json-errors", "false"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.starts_with("error (json):"), "stderr: {}", text);
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_err());
}

#[test]
fn verbose_adds_human_line_to_json_errors() {
    let out = run(&["decompose", "--inline", "not json", "-v"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr);
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(first).is_ok());
    assert!(lines.next().unwrap().starts_with("error (json):"));
}

#[test]
fn missing_input_is_a_usage_error() {
    let out = run(&["decompose"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conflicting_inputs_are_a_usage_error() {
    let out = run(&["decompose", "--inline", "{}", "--input", "nope.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_is_an_io_error() {
    let out = run(&["decompose", "--input", "/nonexistent/f.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");
}
