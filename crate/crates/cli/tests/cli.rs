use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sunit"))
        .args(args)
        .env_remove("SUNIT_THREADS")
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON record per line"))
        .collect()
}

fn summary(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    records(&out).into_iter().find(|r| r["type"] == "summary").unwrap()
}

#[test]
fn solve_examples() {
    let s = summary(&["solve", "--primes", "2,3"]);
    assert_eq!(s["classes"], "4");
    assert_eq!(s["solutions"], "21");
    assert_eq!(s["radical"], "6");
    assert_eq!(summary(&["solve", "--first-n", "1"])["classes"], "1");
    assert_eq!(summary(&["solve", "--primes", "3,5"])["classes"], "0");
}

#[test]
fn full_records_use_strings_and_fractions() {
    let out = run(&["solve", "--primes", "2,3", "--full"]);
    let recs = records(&out);
    let classes: Vec<&Value> = recs.iter().filter(|r| r["type"] == "class").collect();
    assert_eq!(classes.len(), 4);
    assert_eq!(classes[0]["representative"]["x"], "1/2");
    assert_eq!(classes[0]["orbit_size"], "3");
    assert_eq!(classes[3]["triple"], serde_json::json!(["1", "8", "9"]));
    assert!(classes.iter().all(|c| c["orbit_size"] == "6" || c["orbit_size"] == "3"));
}

#[test]
fn csv_table() {
    let out = run(&["solve", "--first-n", "1..4", "--csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,count\n1,1\n2,4\n3,17\n4,63\n");
}

#[test]
fn radical_range() {
    let out = run(&["solve", "--radical-max", "10"]);
    let recs = records(&out);
    let got: Vec<(String, String)> = recs
        .iter()
        .map(|r| (r["radical"].as_str().unwrap().into(), r["classes"].as_str().unwrap().into()))
        .collect();
    let want = [("2", "1"), ("3", "0"), ("5", "0"), ("6", "4"), ("7", "0"), ("10", "2")];
    let want: Vec<(String, String)> = want.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    assert_eq!(got, want);
}

#[test]
fn invalid_input_exits_with_two() {
    assert_eq!(run(&["solve", "--primes", "2,4"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--primes", "2,3,3"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--primes", "x"]).status.code(), Some(2));
    assert_eq!(run(&["solve"]).status.code(), Some(2));
    assert_eq!(run(&["verify-abc", "--radical-max", "1"]).status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_with_three() {
    let out = run(&["solve", "--primes", "2,3,5", "--precision-cap", "8"]);
    assert_eq!(out.status.code(), Some(3));
    let recs = records(&out);
    assert_eq!(recs[0]["complete"], false);
    assert_eq!(recs[1]["type"], "error");
    assert_eq!(recs[1]["budget"], true);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let base = run(&["solve", "--first-n", "4", "--full", "--threads", "1"]);
    for t in ["4", "8"] {
        let other = run(&["solve", "--first-n", "4", "--full", "--threads", t]);
        assert_eq!(base.stdout, other.stdout, "--threads {t}");
    }
    let env = Command::new(env!("CARGO_BIN_EXE_sunit"))
        .args(["solve", "--first-n", "4", "--full"])
        .env("SUNIT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(base.stdout, env.stdout);
}

#[test]
fn timings_are_opt_in() {
    let s = summary(&["solve", "--primes", "2,3"]);
    assert!(s.get("timings").is_none());
    let s = summary(&["solve", "--primes", "2,3", "--timings"]);
    assert!(s["timings"]["total_ms"].is_string());
}

#[test]
fn verify_abc_small() {
    let out = run(&["verify-abc", "--radical-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs[0]["violations"], "0");
    assert_eq!(recs[0]["note"], "(1,1,2) excluded");

    let out = run(&["verify-abc", "--radical-max", "30", "--top", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs[0]["violations"], "0");
    let top: Vec<&Value> = recs.iter().filter(|r| r["type"] == "top").collect();
    assert_eq!(top.len(), 2);
    assert_eq!(top[0]["triple"], serde_json::json!(["3", "125", "128"]));
}

#[test]
fn verify_abc_finds_reyssat_triple() {
    let out = run(&["verify-abc", "--radical-max", "15042", "--top", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let top = recs.iter().find(|r| r["type"] == "top").unwrap();
    assert_eq!(top["triple"], serde_json::json!(["2", "6436341", "6436343"]));
    let lo: f64 = top["quality"]["lo"].as_str().unwrap().parse().unwrap();
    let hi: f64 = top["quality"]["hi"].as_str().unwrap().parse().unwrap();
    assert!(lo <= hi && (lo - 1.6299).abs() < 1e-4 && (hi - 1.6299).abs() < 1e-4);
}
