//! Black-box tests of the installed binary: spawn it, check exit codes and
//! output shapes.

use num_bigint::BigUint;
use serde_json::Value;
use std::process::{Command, Output};

fn surdcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surdcf"))
        .args(args)
        .env_remove("SURD_MAX_ITER")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn expand_prints_the_full_period() {
    let out = surdcf(&["expand", "157", "45"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("= [1, {1, 6, 1, 1, 3, 4, 1, 32, 1, 4, 3, 1, 1, 6, 1, 2}]"));
    assert!(text.contains("period length = 16 (m = 15)"));
}

#[test]
fn expand_defaults_to_a_plain_square_root() {
    let out = surdcf(&["expand", "2"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("√2 = [1, {2}]"));
}

#[test]
fn expand_json_numbers_round_trip() {
    let out = surdcf(&["expand", "157", "45", "--format", "json"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["b0"], "1");
    assert_eq!(doc["period_length"], 16);
    assert_eq!(doc["m"], 15);
    let period = doc["period"].as_array().unwrap();
    assert_eq!(period.len(), 16);
    assert_eq!(period[15], "2");
    // every numeric field is a decimal string that parses back exactly
    for field in ["D", "Q", "b0"] {
        let raw = doc[field].as_str().unwrap();
        let parsed: BigUint = raw.parse().unwrap();
        assert_eq!(parsed.to_string(), raw);
    }
}

#[test]
fn expand_rejects_squares_with_exit_2() {
    let out = surdcf(&["expand", "4", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("perfect square"));
}

#[test]
fn expand_rejects_garbage_with_exit_2() {
    let out = surdcf(&["expand", "abc", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("nonnegative integer"));
}

#[test]
fn iteration_cap_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_surdcf"))
        .args(["expand", "157", "45"])
        .env("SURD_MAX_ITER", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("no period found within 3 steps"));

    let out = Command::new(env!("CARGO_BIN_EXE_surdcf"))
        .args(["expand", "157", "45"])
        .env("SURD_MAX_ITER", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("SURD_MAX_ITER"));
}

#[test]
fn units_table_lists_the_ladder() {
    let out = surdcf(&["units", "157", "45", "--count", "4"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("D1 = 785, D2 = 7065, q = 15, η = ε^4"));
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], ["1", "28", "1", "-1", "1", "4", "irregular"]);
    assert_eq!(rows[1], ["2", "1569", "56", "+1", "3", "7", "irregular"]);
    assert_eq!(rows[2], ["3", "87892", "3137", "-1", "1", "10", "irregular"]);
    assert_eq!(rows[3], ["4", "4923521", "175728", "+1", "1", "15", "regular"]);
}

#[test]
fn units_json_has_decimal_strings() {
    let out = surdcf(&["units", "3", "2", "--count", "1", "--format", "json"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["D1"], "6");
    assert_eq!(doc["eta_power"], 1);
    let unit = &doc["units"][0];
    assert_eq!(unit["r"], "5");
    assert_eq!(unit["s"], "2");
    assert_eq!(unit["norm"], 1);
    assert_eq!(unit["class"], "regular");
}

#[test]
fn verify_runs_all_checks_on_a_classic_surd() {
    let out = surdcf(&["verify", "2", "1"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    for id in ["t1", "t2", "c1", "t3"] {
        assert!(text.contains(&format!("{id}: pass")), "missing {id} in {text}");
    }
}

#[test]
fn verify_scaled_expansion_example() {
    let out = surdcf(&["verify", "157", "45", "--which", "t3", "--l", "1", "--t", "1008"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("t3: pass"));
    assert!(text.contains("[4884, 2, 4, 12, 4, 2]"));
    assert!(text.contains("[4884, {2, 4, 12, 4, 2, 9768}]"));
    assert!(text.contains("a = 112"));
}

#[test]
fn verify_convergent_match_example() {
    let out = surdcf(&["verify", "157", "45", "--which", "c1", "--l", "1", "--format", "json"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let doc: Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let check = &doc["checks"][0];
    assert_eq!(check["check"], "c1");
    assert_eq!(check["status"], "pass");
    let entry = &check["detail"]["entries"][0];
    assert_eq!(entry["r"], "4923521");
    assert_eq!(entry["s_d2"], "58576");
}

#[test]
fn verify_t3_without_divisor_is_a_usage_error() {
    let out = surdcf(&["verify", "157", "45", "--which", "t3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--t"));
}

#[test]
fn sweep_smallest_range_has_one_surd() {
    let out = surdcf(&["sweep", "--dmax", "2"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("surds checked: 1"));
    assert!(text.contains("violations: 0"));
}

#[test]
fn sweep_writes_sorted_ndjson_rows() {
    let path = std::env::temp_dir().join(format!("surdcf-rows-{}.ndjson", std::process::id()));
    let out = surdcf(&[
        "sweep",
        "--dmax",
        "10",
        "--ndjson",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let doc: Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let rows = doc["rows"].as_u64().unwrap();
    assert_eq!(doc["violations"].as_array().unwrap().len(), 0);

    let body = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines.len() as u64, rows);
    let mut last_key = (0u64, 0u64);
    for line in lines {
        let row: Value = serde_json::from_str(line).unwrap();
        assert_eq!(row["status"], "pass");
        let d: u64 = row["D"].as_str().unwrap().parse().unwrap();
        let q: u64 = row["Q"].as_str().unwrap().parse().unwrap();
        assert!((d, q) >= last_key, "rows not sorted");
        last_key = (d, q);
    }
}

#[test]
fn sweep_rejects_tiny_bounds() {
    let out = surdcf(&["sweep", "--dmax", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--dmax"));
}
