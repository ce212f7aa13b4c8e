use serde_json::Value;
use std::process::{Command, Output};

fn saranfk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saranfk")).args(args).env_remove("SARANFK_DEFAULT_ORDER").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn without_times(mut v: Vec<Value>) -> Vec<Value> {
    for r in &mut v {
        r.as_object_mut().unwrap().remove("wall_time_ms");
    }
    v
}

#[test]
fn eval_gauss() {
    let o = saranfk(&["eval", "2f1", "--a", "1", "--b", "1", "--c", "2", "--z", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("value: 1.3862943611"), "{s}");
    assert!(s.contains("converged: true"));
}

#[test]
fn eval_fk_origin_and_domain_error() {
    let p = ["--alpha1", "1.2", "--alpha2", "0.7", "--beta1", "2", "--beta2", "0.4", "--gamma1", "1.5"];
    let mut a = vec!["eval", "fk", "--x", "0", "--y", "0", "--z", "0", "--gamma2", "2", "--gamma3", "3", "--format", "json"];
    a.extend(p);
    let o = saranfk(&a);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"]["re"], 1.0);
    assert_eq!(v["value"]["im"], 0.0);

    let o = saranfk(&["eval", "fk", "--x", "0.5", "--y", "0.5", "--z", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside D_K"));
}

#[test]
fn eval_usage_errors() {
    assert_eq!(saranfk(&["eval", "nope"]).status.code(), Some(2));
    assert_eq!(saranfk(&["eval", "2f1", "--a", "1"]).status.code(), Some(2));
    // pole in the lower parameter
    assert_eq!(saranfk(&["eval", "2f1", "--a", "1", "--b", "1", "--c", "-2", "--z", "0.5"]).status.code(), Some(2));
    assert_eq!(saranfk(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn order_from_environment() {
    let run = |order: &str| {
        Command::new(env!("CARGO_BIN_EXE_saranfk"))
            .args(["eval", "measure-moment", "--alpha", "2", "--beta", "3", "--ell", "3", "--format", "json"])
            .env("SARANFK_DEFAULT_ORDER", order)
            .output()
            .unwrap()
    };
    let o = run("8");
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["terms_used"], 8);
    // (2)_3/(5)_3 = 24/210
    assert!((v["value"]["re"].as_f64().unwrap() - 24.0 / 210.0).abs() < 1e-15);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn list_formats() {
    let o = saranfk(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("fk-erdelyi") && s.contains("Theorem 1.1"));
    assert_eq!(s.lines().count(), 26);

    let v: Value = serde_json::from_str(&stdout(&saranfk(&["list", "--format", "json"]))).unwrap();
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 26);
    assert!(list.iter().all(|e| e["id"].is_string() && e["tol"].is_number()));
}

#[test]
fn verify_unknown_identity_is_config_error() {
    let o = saranfk(&["verify", "--identities", "bogus-id"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert_eq!(saranfk(&["verify", "--identities", "euler-1", "--q", "1.5"]).status.code(), Some(2));
}

#[test]
fn verify_triple_integral_case() {
    let o = saranfk(&["verify", "--identities", "fk-erdelyi", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("PASS")).count(), 1);
    assert!(s.contains("triple-integral") && s.contains("Theorem 1.1"));
}

#[test]
fn verify_all_json_is_reproducible() {
    let args = ["verify", "--identities", "all", "--seed", "42", "--samples", "3", "--format", "json"];
    let a = saranfk(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let ra = records(&stdout(&a));
    assert_eq!(ra.len(), 26);
    let keys = ["id", "anchor", "q", "samples", "max_rel_residual", "pass", "wall_time_ms", "failures"];
    for r in &ra {
        let o = r.as_object().unwrap();
        assert_eq!(o.len(), keys.len());
        assert!(keys.iter().all(|k| o.contains_key(*k)));
        assert_eq!(r["pass"], true);
    }
    let b = saranfk(&args);
    assert_eq!(without_times(ra), without_times(records(&stdout(&b))));
}

#[test]
fn failing_run_exits_one_and_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let p = path.to_str().unwrap();
    let o = saranfk(&[
        "verify", "--identities", "bateman,gasper-q-erdelyi-3", "--samples", "2", "--tol", "0", "--q", "0.4",
        "--format", "json", "--output", p,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rs = records(&text);
    assert_eq!(rs[0]["id"], "bateman");
    assert!(rs[0]["q"].is_null());
    assert_eq!(rs[1]["id"], "gasper-q-erdelyi-3@q=0.4");
    assert_eq!(rs[1]["q"], 0.4);
    assert!(rs.iter().all(|r| r["pass"] == false && !r["failures"].as_array().unwrap().is_empty()));
    let f = &rs[0]["failures"][0];
    assert!(f["params"]["alpha"].is_number() && f["residual"].is_number());

    let again = saranfk(&["report", p, "--format", "json"]);
    assert_eq!(again.status.code(), Some(1));
    assert_eq!(records(&stdout(&again)), rs);

    let csv = saranfk(&["report", p, "--format", "csv"]);
    assert_eq!(stdout(&csv).lines().count(), 3);
    let human = stdout(&saranfk(&["report", p]));
    assert!(human.starts_with("FAIL bateman") && human.contains("0/2 passed"));
}

#[test]
fn report_on_garbage_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(&path, "{not json}\n").unwrap();
    assert_eq!(saranfk(&["report", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(saranfk(&["report", "/nonexistent/report.jsonl"]).status.code(), Some(2));
}
