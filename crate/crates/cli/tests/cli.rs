use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const GAMMA: &str = r#"{"phi":1.5707963267948966,"psi":-1.5707963267948966,"s":1.2,"delta":0.05}"#;

fn ratcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratcheck")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ratcheck-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn kronecker_geometric() {
    let out = ratcheck(&["kronecker", "--input", r#"{"kind":"rational","numerator":[1],"denominator":["1","-1"]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["result"]["verdict"], "RationalEvidence");
    assert_eq!(r["config"]["knobs"]["m_hi"], 12);
    assert!(r["result"]["dets"].as_array().unwrap().iter().all(|d| d == "0"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = ratcheck(&["factor", "--input", "{}"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn precondition_violations_exit_2() {
    let geo = r#"{"kind":"rational","numerator":[1],"denominator":[1,-1]}"#;
    for args in [
        vec!["kronecker", "--input", geo, "--m-lo", "5", "--m-hi", "2"],
        vec!["kronecker", "--input", r#"{"kind":"table","coeffs":[1,1,1]}"#, "--m-hi", "3"],
        vec!["criterion", "--input", geo],
        vec!["criterion", "--input", r#"{"kind":"rational","numerator":[[1]],"denominator":[[1,-1],[-1]]}"#, "--N", "5"],
        vec!["capacity", "--input", r#"{"kind":"circle","r":1}"#, "--n-max", "3"],
        vec!["iota-check", "--input", GAMMA, "--density", "10"],
        vec!["symcheck", "--input", r#"{"g":{"numerator":[1]},"contour":{"phi":1,"psi":-1,"s":1.2,"delta":0.05}}"#, "--m-hi", "3"],
        vec!["kronecker", "--input", "{not json"],
        vec!["kronecker", "--input", r#"{"kind":"spline"}"#],
        vec!["kronecker", "--input", "/nonexistent/series.json"],
        vec!["kronecker", "--input", geo, "--seed", "3"],
    ] {
        let out = ratcheck(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn report_and_csv_files() {
    let dir = scratch("files");
    let out_path = dir.join("crit.json");
    let input = dir.join("series.json");
    std::fs::write(&input, r#"{"kind":"rational","numerator":[[1]],"denominator":[[1,-1],[-1]]}"#).unwrap();
    let out = ratcheck(&[
        "criterion",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--m-hi",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    assert_eq!(r["config"]["input_source"], input.to_str().unwrap());
    assert_eq!(r["config"]["knobs"]["order"], 24);
    assert_eq!(r["result"]["verdict"], "RationalEvidence");
    let csv = std::fs::read_to_string(out_path.with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,vanishes,degree,witness_degree,witness_coeff,sup_bound"));
    assert!(lines.next().unwrap().starts_with("1,true,"));
    assert_eq!(lines.count(), 3);
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn reconstruct_finds_fibonacci_and_rejects_lacunary() {
    let out = ratcheck(&["reconstruct", "--input", r#"{"kind":"rational","numerator":[1],"denominator":[1,-1,-1]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["result"]["degree"], 2);
    assert_eq!(r["result"]["rational"]["denominator"], serde_json::json!(["1", "-1", "-1"]));

    let out = ratcheck(&["reconstruct", "--input", r#"{"kind":"lacunary","rule":"squares"}"#]);
    assert_eq!(out.status.code(), Some(1));
    let r = stdout_json(&out);
    assert_eq!(r["error"]["kind"], "NoRationalFit");
    assert!(r.get("result").is_none());
}

#[test]
fn big_coefficients_survive_as_strings() {
    let big = "123456789012345678901234567890";
    let input = format!(r#"{{"kind":"table","coeffs":["{big}","0","0","0","0","0","0"]}}"#);
    let out = ratcheck(&["kronecker", "--input", &input, "--m-hi", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["config"]["input"]["coeffs"][0], big);
    assert_eq!(r["result"]["dets"][0], "0");
}

#[test]
fn capacity_of_circle() {
    let out = ratcheck(&["capacity", "--input", r#"{"kind":"circle","r":2,"count":600}"#, "--n-max", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["result"]["cloud_size"], 600);
    let d = r["result"]["report"]["d_n"].as_f64().unwrap();
    // six equally spaced points of radius 2 lie on the grid: d_6 = 2·6^{1/5}
    assert!((d - 2.0 * 6f64.powf(0.2)).abs() < 1e-9, "{d}");
}

#[test]
fn iota_check_reports_missing_certificate() {
    let out = ratcheck(&["iota-check", "--input", GAMMA, "--n-max", "10", "--density", "64"]);
    assert_eq!(out.status.code(), Some(1));
    let r = stdout_json(&out);
    assert_eq!(r["error"]["kind"], "NoCertificate");
    assert_eq!(r["config"]["knobs"]["n_max"], 10);
}

#[test]
fn contour_bound_with_given_rho() {
    let input = format!(r#"{{"contour":{GAMMA},"M":2,"rho":0.8}}"#);
    let out = ratcheck(&["contour-bound", "--input", &input, "--m-hi", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["result"]["m0"], 2);
    assert_eq!(r["result"]["bounds"].as_array().unwrap().len(), 6);
    assert!((r["result"]["eta"].as_f64().unwrap() - 0.95).abs() < 1e-15);

    let out = ratcheck(&["contour-bound", "--input", &format!(r#"{{"contour":{GAMMA},"M":200,"rho":0.99}}"#), "--m-hi", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let r = stdout_json(&out);
    assert_eq!(r["error"]["kind"], "NoM0");
    assert!(r["result"]["m0"].is_null());
}

#[test]
fn dfinite_modes() {
    let out = ratcheck(&[
        "dfinite",
        "--input",
        r#"{"kind":"dfinite","variables":["z"],"equations":[[[-2],[1,-4]]],"initials":[1]}"#,
        "--N",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["config"]["knobs"]["mode"], "univariate");
    assert_eq!(r["result"]["coeffs"], serde_json::json!(["1", "2", "6", "20", "70", "252"]));

    let table = r#"{"kind":"product","g":{"kind":"rational","numerator":[1],"denominator":[1,-1]},"h":{"kind":"lacunary","rule":"factorials"}}"#;
    let out = ratcheck(&["dfinite", "--input", table, "--N", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["config"]["knobs"]["mode"], "table");
    assert_eq!(r["result"]["criterion"]["verdict"], "NotRationalEvidence");

    // (1 - z - w) f_z = f with (1 - w) f_w = f has no common solution
    let bad = r#"{"kind":"dfinite","variables":["z","w"],"equations":[[[-1],[[1,-1],[-1]]],[[-1],[1,-1]]],"initials":[[1]]}"#;
    let out = ratcheck(&["dfinite", "--input", bad]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "InconsistentSystem");
}

#[test]
fn symcheck_passes_for_rational_g() {
    let input = format!(r#"{{"g":{{"numerator":[1],"denominator":[1,-0.5]}},"contour":{GAMMA}}}"#);
    let out = ratcheck(&["symcheck", "--input", &input, "--m-hi", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["result"]["passed"], true);
    assert_eq!(r["result"]["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn help_documents_csv_columns() {
    let out = ratcheck(&["capacity", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("CSV columns: n,d_n,tau_upper"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = scratch("det");
    let path = dir.join("cap.json");
    let run = || {
        let out = ratcheck(&[
            "capacity",
            "--input",
            r#"{"kind":"segment","a":[-1,0],"b":[1,0],"count":300}"#,
            "--n-max",
            "10",
            "--seed",
            "11",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        (std::fs::read(&path).unwrap(), std::fs::read(path.with_extension("csv")).unwrap())
    };
    assert_eq!(run(), run());
    let _ = std::fs::remove_dir_all(dir);
}
