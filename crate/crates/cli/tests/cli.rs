use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use chorefit::io::AllocationJson;
use serde_json::Value;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/example.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chorefit")).args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_chorefit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn one_line_stderr(o: &Output) {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
}

fn worked_tuple() -> &'static str {
    r#"{"items":["c1","c2","c3","c4","c5","c6","c7","c8","c9","c10","c11","c12","c13","c14","c15"],
        "bundles":[["c1","c6"],["c2","c3","c7"],["c4","c5","c8"],["c9","c10","c11","c12","c13","c14"]],
        "agent":0,"tau":"75"}"#
}

#[test]
fn ratios_for_five_agents() {
    let o = run(&["ratios", "--n", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), r#"{"n":5,"alpha":"20/17"}"#);
    assert!(o.stderr.is_empty());
}

#[test]
fn mms_of_nothing_is_zero() {
    let o = run(&["mms", "--costs", "", "--n", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), r#"{"mu":0}"#);
    let o = run_stdin(&["mms", "--input", "-"], r#"{"n":2,"m":0,"costs":[[],[]]}"#);
    assert_eq!(stdout(&o).trim(), r#"{"mu":0}"#);
}

#[test]
fn mms_of_the_fixture() {
    let f = fixture();
    let f = f.to_str().unwrap();
    assert_eq!(json(&run(&["mms", "--input", f]))["mu"], 74);
    assert_eq!(json(&run(&["mms", "--input", f, "--agent", "3"]))["mu"], 73);
    let cert = json(&run(&["mms", "--input", f, "--certificate"]));
    assert_eq!(cert["partition"].as_array().unwrap().len(), 4);
}

#[test]
fn hffd_leaves_the_smallest_chore() {
    let o = run(&["hffd", "--input", fixture().to_str().unwrap(), "--thresholds", "75,75,75,75"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["unallocated"], serde_json::json!(["c15"]));
    assert_eq!(v["bundles"][0], serde_json::json!(["c1", "c6"]));
    assert_eq!(v["assignment"][3], 0);
}

#[test]
fn ffd_reproduces_the_partition() {
    let o = run(&["ffd", "--input", fixture().to_str().unwrap(), "--tau", "75"]);
    let v = json(&o);
    assert_eq!(v["complete"], true);
    assert_eq!(v["costs"], serde_json::json!([75, 66, 75, 70]));
}

#[test]
fn multifit_lands_on_a_feasible_capacity() {
    let v = json(&run(&["multifit", "--input", fixture().to_str().unwrap()]));
    assert_eq!(v["threshold"], 75);
}

#[test]
fn allocate_writes_a_reloadable_allocation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("alloc.json");
    let o = run(&[
        "allocate",
        "--input",
        fixture().to_str().unwrap(),
        "--epsilon",
        "1/100",
        "--with-mms",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let a: AllocationJson = serde_json::from_str(&text).unwrap();
    let alloc = a.to_allocation(15).unwrap();
    assert!(alloc.is_complete());
    assert_eq!(serde_json::to_value(AllocationJson::from_allocation(&alloc)).unwrap()["bundles"], serde_json::from_str::<Value>(&text).unwrap()["bundles"]);
}

#[test]
fn exact_mode_for_three_agents() {
    let inst = r#"{"n":3,"m":7,"costs":[[9,8,7,6,5,4,3],[3,4,5,6,7,8,9],[5,5,5,5,5,5,5]]}"#;
    let o = run_stdin(&["allocate", "--input", "-", "--exact", "--with-mms"], inst);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["epsilon"], "1/26");
    for i in 0..3 {
        let cost = v["agent_costs"][i].as_u64().unwrap();
        let mu = v["mms"][i].as_u64().unwrap();
        assert!(13 * cost <= 15 * mu, "agent {i}: {cost} vs {mu}");
    }
    let o = run(&["allocate", "--input", fixture().to_str().unwrap(), "--exact"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_accepts_and_rejects() {
    let f = fixture();
    let f = f.to_str().unwrap();
    let o = run_stdin(&["verify", "ffv", "--tuple", "-", "--instance", f], worked_tuple());
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["ffv"], true);

    let swapped = worked_tuple().replace(r#"["c1","c6"],["c2","c3","c7"]"#, r#"["c2","c3","c7"],["c1","c6"]"#);
    let o = run_stdin(&["verify", "ffv", "--tuple", "-", "--instance", f], &swapped);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["ffv"], false);
    assert_eq!(v["benchmarks"][0], serde_json::json!(["c1", "c7", "c8"]));
}

#[test]
fn tidy_and_reduce_on_the_fixture() {
    let f = fixture();
    let f = f.to_str().unwrap();
    let o = run_stdin(&["verify", "tidy", "--tuple", "-", "--instance", f, "--cstar", "c15"], worked_tuple());
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["failures"], serde_json::json!([]));
    assert_eq!(v["cstar"], "c15");

    let o = run_stdin(&["reduce", "--tuple", "-", "--instance", f, "--cstar", "c15"], worked_tuple());
    assert_eq!(code(&o), 1);
    one_line_stderr(&o);
    assert!(o.stdout.is_empty());

    let o = run_stdin(&["verify", "tidy", "--tuple", "-", "--instance", f, "--cstar", "c1"], worked_tuple());
    assert_eq!(code(&o), 2);
}

#[test]
fn fuzz_reports_its_scope() {
    let o = run(&["fuzz", "monotonicity", "--n", "2", "--alpha", "1,8/7", "--seeds", "30", "--max-m", "8"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["scope"], "verified up to (n=2, m=8, cost=50)");
    assert_eq!(v["instances"], 30);
    assert_eq!(v["counterexamples"], serde_json::json!([]));
}

#[test]
fn usage_and_format_errors_exit_two() {
    let cases: Vec<(Vec<&str>, Option<&str>)> = vec![
        (vec!["ratios", "--n", "5", "--bogus"], None),
        (vec!["nonsense"], None),
        (vec!["ratios", "--n", "1"], None),
        (vec!["mms", "--input", "-"], Some("{not json")),
        (vec!["mms", "--input", "-"], Some(r#"{"n":1,"m":2,"costs":[[3,-1]]}"#)),
        (vec!["mms", "--input", "-"], Some(r#"{"n":2,"m":2,"costs":[[3,1],[2]]}"#)),
        (vec!["mms", "--costs", "1,2,x", "--n", "2"], None),
        (vec!["mms", "--costs", "1,2", "--n", "9"], None),
        (vec!["ffd", "--costs", "1,2", "--n", "1", "--tau", "3/0"], None),
        (vec!["hffd", "--input", "-", "--thresholds", "5,5"], Some(r#"{"n":2,"m":2,"costs":[[3,1],[1,3]]}"#)),
        (vec!["fuzz", "monotonicity", "--max-m", "21"], None),
        (vec!["allocate", "--input", "/nonexistent/file.json"], None),
    ];
    for (args, input) in cases {
        let o = match input {
            Some(i) => run_stdin(&args, i),
            None => run(&args),
        };
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        one_line_stderr(&o);
    }
}

#[test]
fn exact_mms_refuses_large_inputs() {
    let costs: Vec<String> = (1..=21).map(|c| c.to_string()).collect();
    let o = run(&["mms", "--costs", &costs.join(","), "--n", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("m <= 20"));
}
