use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qfig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfig")).args(args).output().unwrap()
}

fn qfig_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfig")).args(args).env(key, value).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn without_timestamp(mut v: Value) -> Value {
    v["environment"].as_object_mut().unwrap().remove("timestamp");
    v
}

fn checks(v: &Value) -> Vec<String> {
    v["rows"].as_array().unwrap().iter().map(|r| r["check"].as_str().unwrap().to_string()).collect()
}

#[test]
fn counterexample_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ce.json");
    let o = qfig(&["counterexample", "--grid", "101", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = report(&out);
    assert_eq!(v["summary"]["violations"], 0);
    let names = checks(&v);
    for expected in ["counterexample_sld_preserved", "counterexample_rld_gap", "counterexample_bkm_gap", "counterexample_recovery_residual"] {
        assert!(names.iter().any(|n| n == expected), "{expected} missing");
    }
    let csv = fs::read_to_string(dir.path().join("ce.csv")).unwrap();
    assert!(csv.starts_with("instance_id,check,lhs,rhs,margin,satisfied\n"));
    assert_eq!(csv.lines().count(), names.len() + 1);
    let grid = fs::read_to_string(dir.path().join("ce.grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 102);
    assert_eq!(v["environment"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["environment"]["tolerances"]["tol"], 1e-8);
}

#[test]
fn dpi_sweep_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dpi.json");
    let args = ["dpi-sweep", "--trials", "200", "--dims", "2,3,4", "--metrics", "bkm,alpha:0.5,wyd:0.3,sld,rld"];
    let o = qfig(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = report(&out);
    assert_eq!(v["summary"]["violations"], 0);
    assert_eq!(v["summary"]["checks"], 200 * (1 + 5 * 4));
    let ids: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["instance_id"].as_u64().unwrap()).collect();
    assert!(ids.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(code(&qfig(&["dpi-sweep", "--trials", "0"])), 2);
    assert_eq!(code(&qfig(&["dpi-sweep", "--trials", ""])), 2);
    assert_eq!(code(&qfig(&["bounds", "--metrics", "fisher"])), 2);
    assert_eq!(code(&qfig(&["bounds", "--metrics", "sld"])), 2);
    assert_eq!(code(&qfig(&["bounds", "--dims", "1"])), 2);
    assert_eq!(code(&qfig(&["bounds", "--config", "/nonexistent/config.json"])), 2);
    assert_eq!(code(&qfig_env(&["bounds", "--trials", "1"], "QFIG_THREADS", "0")), 2);
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("bad.json", "{not json"),
        ("unknown.json", r#"{"trials": 3, "colour": "red"}"#),
        ("other.json", r#"{"command": "bounds"}"#),
        ("affine.json", r#"{"family": {"kind": "counterexample", "p": "cubic:1,2"}}"#),
    ] {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        assert_eq!(code(&qfig(&["counterexample", "--config", p.to_str().unwrap()])), 2, "{name}");
    }
}

#[test]
fn violations_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ce.json");
    let o = qfig(&["counterexample", "--grid", "21", "--tol", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = report(&out);
    assert!(v["summary"]["violations"].as_u64().unwrap() > 0);
    let failed = v["rows"].as_array().unwrap().iter().filter(|r| r["satisfied"] == false).count();
    assert_eq!(failed as u64, v["summary"]["violations"].as_u64().unwrap());
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let args = ["pair-sufficiency", "--seed", "11", "--trials", "6", "--dims", "2,3", "--out", out.to_str().unwrap()];
        assert_eq!(code(&qfig_env(&args, "QFIG_THREADS", threads)), 0);
        without_timestamp(report(&out))
    };
    let (a, b) = (run("a.json", "1"), run("b.json", "4"));
    assert_eq!(a, b);
    let csv = |n: &str| fs::read_to_string(dir.path().join(n)).unwrap();
    assert_eq!(csv("a.csv"), csv("b.csv"));
    let c = {
        let out = dir.path().join("c.json");
        qfig(&["pair-sufficiency", "--seed", "12", "--trials", "6", "--dims", "2,3", "--out", out.to_str().unwrap()]);
        without_timestamp(report(&out))
    };
    assert_ne!(a["rows"], c["rows"]);
}

#[test]
fn every_command_runs_clean() {
    for args in [
        &["family-sufficiency", "--trials", "4", "--dims", "2,3", "--grid", "21"][..],
        &["bounds", "--trials", "6"],
        &["asymmetry", "--trials", "8", "--metrics", "bkm,wyd:0.5"],
        &["quadrature-audit", "--trials", "4"],
    ] {
        let o = qfig(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["command"], args[0]);
        assert!(v["summary"]["checks"].as_u64().unwrap() > 0);
    }
}

#[test]
fn config_file_instances() {
    let dir = tempfile::tempdir().unwrap();
    let rho = r#"{"dim":2,"re":[[0.7,0.1],[0.1,0.3]],"im":[[0,0.05],[-0.05,0]]}"#;
    let sigma = r#"{"dim":2,"re":[[0.5,0],[0,0.5]]}"#;
    let h = r#"{"dim":2,"re":[[0,0],[0,1]]}"#;
    let dephase = r#"{"dim_in":2,"dim_out":2,"kraus":[{"dim":2,"re":[[1,0],[0,0]]},{"dim":2,"re":[[0,0],[0,1]]}]}"#;
    let cases = [
        ("family-sufficiency", format!(r#"{{"family":{{"kind":"unitary-orbit","rho":{rho},"H":{h}}},"channel":{dephase},"grid":201,"metrics":["bkm"]}}"#), "NOT_SUFFICIENT"),
        ("pair-sufficiency", format!(r#"{{"rho":{rho},"sigma":{sigma},"channel":{dephase}}}"#), "NOT_SUFFICIENT"),
        ("asymmetry", format!(r#"{{"rho":{rho},"channel":{dephase},"H":{h}}}"#), "NOT_SUFFICIENT"),
        ("family-sufficiency", r#"{"family":{"kind":"counterexample"},"metrics":["bkm","sym-inv"],"grid":21}"#.to_string(), "NOT_SUFFICIENT"),
    ];
    for (k, (command, text, verdict)) in cases.iter().enumerate() {
        let p = dir.path().join(format!("c{k}.json"));
        fs::write(&p, text).unwrap();
        let o = qfig(&[command, "--config", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{command}: {}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        let verdicts: Vec<&str> = v["rows"].as_array().unwrap().iter().filter_map(|r| r["verdict"].as_str()).collect();
        assert!(!verdicts.is_empty() && verdicts.iter().all(|x| x == verdict), "{command}: {verdicts:?}");
    }
}

#[test]
fn unitary_channels_are_sufficient_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let rho = r#"{"dim":2,"re":[[0.6,0.2],[0.2,0.4]]}"#;
    let sigma = r#"{"dim":2,"re":[[0.3,0],[0,0.7]]}"#;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = format!(r#"{{"dim_in":2,"dim_out":2,"kraus":[{{"re":[[{s},{s}],[{s},-{s}]]}}]}}"#);
    let p = dir.path().join("u.json");
    fs::write(&p, format!(r#"{{"rho":{rho},"sigma":{sigma},"channel":{hadamard}}}"#)).unwrap();
    let o = qfig(&["pair-sufficiency", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["rows"].as_array().unwrap().iter().filter_map(|r| r["verdict"].as_str()).all(|x| x == "SUFFICIENT"));
}
