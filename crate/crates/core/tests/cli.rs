use std::process::{Command, Output};

use qform_codes::code::WeightDistribution;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qform-codes")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn wdist_csv_table() {
    let o = run(&["code", "wdist", "--p", "5", "--e", "3", "--form", "tr_x2", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "weight,multiplicity\n0,1\n2375,240\n2500,15224\n2625,160\n");
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.lines().all(|l| l.starts_with("PASS ")), "{err}");
}

#[test]
fn ghw_formula_rows() {
    let o = run(&["code", "ghw", "--p", "5", "--e", "3", "--r", "all", "--method", "formula"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "r,d_r,method");
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[6], "6,3124,formula");
}

#[test]
fn ghw_both_methods_agree() {
    let o = run(&["code", "ghw", "--p", "3", "--e", "3", "--r", "1,3,6", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn wdist_json_round_trips() {
    let o = run(&["code", "wdist", "--p", "3", "--e", "4", "--form", "tr_theta_x2", "--method", "both", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).expect("json");
    let wd: WeightDistribution = serde_json::from_value(v["result"]["distribution"].clone()).expect("schema");
    assert_eq!(wd.enumerator(), "1 + 66x^1296 + 6398x^1458 + 96x^1539");
    assert_eq!(serde_json::to_value(&wd).unwrap(), v["result"]["distribution"]);
    assert_eq!(v["form"]["sign"], 1);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = ["code", "wdist", "--p", "3", "--e", "3", "--method", "enumerate", "--output", "json"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let four = run(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
    let ghw = ["code", "ghw", "--p", "3", "--e", "3", "--r", "2", "--method", "brute", "--output", "json"];
    assert_eq!(run(&[&ghw[..], &["--threads", "1"]].concat()).stdout, run(&[&ghw[..], &["--threads", "3"]].concat()).stdout);
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    for (args, field) in [
        (vec!["code", "wdist", "--p", "3", "--e", "3", "--alpha", "0"], "alpha"),
        (vec!["code", "wdist", "--p", "3", "--e", "3", "--form", "0;0;0"], "form"),
        (vec!["code", "wdist", "--p", "4", "--e", "3"], "p/e"),
        (vec!["code", "wdist", "--p", "3", "--e", "3", "--modulus", "1,0,0,1"], "modulus"),
        (vec!["code", "ghw", "--p", "3", "--e", "3", "--r", "7"], "r"),
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(&format!("invalid {field}")), "{args:?}");
    }
    assert_eq!(run(&["code", "wdist"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn budget_exceeded_exits_3() {
    let o = run(&["code", "wdist", "--p", "5", "--e", "3", "--method", "enumerate", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn alternative_modulus_gives_same_examples() {
    let o = run(&["code", "check-examples", "--modulus", "2,1,0,0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn field_and_form_commands() {
    let o = run(&["field", "build", "--p", "3", "--e", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("modulus,\"[1, 0, 2, 1]\""));
    let o = run(&["field", "show", "--p", "3", "--e", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 10);
    let o = run(&["form", "analyze", "--p", "3", "--e", "4", "--form", "tr_x2", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["profile"]["sign"], -1);
    assert_eq!(v["result"]["profile"]["rank"], 4);
}

#[test]
fn sums_verify_reports_both_conventions() {
    let o = run(&["sums", "verify", "--p", "5", "--e", "3", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["sums", "verify", "--p", "3", "--e", "3", "--output", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let failed: Vec<&str> = v["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(failed, ["weil sum closed form [sqrt(p*)=g] at (p,e)=(3,3)"]);
}
