use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_entangle"));
    c.env_remove("ENTANGLE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
        .display()
        .to_string()
}

/// Report with the wall-clock field removed.
fn stable(mut v: Value) -> Value {
    v["manifest"]["wall_clock_seconds"] = Value::Null;
    v
}

#[test]
fn edist_reports_unit_fraction_for_phi() {
    let out = run(&[
        "edist",
        "--state",
        "kind=max_entangled,d=2",
        "--d",
        "2",
        "--restarts",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let e = v["report"]["e_lower"].as_f64().unwrap();
    assert!((e - 1.0).abs() <= 1e-9);
    assert_eq!(v["manifest"]["command"], "edist");
}

#[test]
fn invalid_input_exits_one_without_stdout() {
    for args in [
        &["edist", "--state", "kind=bogus", "--d", "2"][..],
        &["edist", "--state", "kind=werner,d=2,mu=1.5", "--d", "2"],
        &["edist", "--state", "/definitely/missing.json", "--d", "2"],
        &[
            "activate",
            "--sigma",
            "kind=werner,d=2,mu=0.8",
            "--lambda",
            "0.3",
            "--d",
            "2",
        ],
        &["no-such-command"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?} wrote to stdout");
        assert!(!out.stderr.is_empty(), "{args:?} gave no diagnostic");
    }
}

#[test]
fn activation_exit_codes() {
    let budget = [
        "--candidates",
        "2",
        "--restarts",
        "2",
        "--witness-samples",
        "200",
    ];
    let mut found = vec![
        "activate",
        "--sigma",
        "kind=werner,d=2,mu=0.8",
        "--lambda",
        "0.6",
        "--d",
        "2",
    ];
    found.extend(budget);
    let out = run(&found);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["result"]["outcome"], "found");
    assert!(v["report"]["e_joint_lower"].as_f64().unwrap() > 0.6);

    let mut not_found = vec![
        "activate",
        "--sigma",
        "kind=product,d=2",
        "--lambda",
        "0.6",
        "--d",
        "2",
    ];
    not_found.extend(budget);
    let out = run(&not_found);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["report"]["result"]["outcome"], "not-found");
}

#[test]
fn seed_comes_from_environment() {
    let args = [
        "teleport-sim",
        "--resource",
        "kind=werner,d=2,mu=0.3",
        "--samples",
        "2000",
    ];
    let with_env = bin()
        .args(args)
        .env("ENTANGLE_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(with_env.status.code(), Some(0));
    let v = json(&with_env);
    assert_eq!(v["manifest"]["seed"], 99);
    let with_flag = run(&[&args[..], &["--seed", "99"]].concat());
    assert_eq!(
        stable(json(&with_flag))["report"],
        stable(v.clone())["report"]
    );
    let default = run(&args);
    assert_eq!(json(&default)["manifest"]["seed"], 0);
    assert_ne!(json(&default)["report"], v["report"]);
}

#[test]
fn reports_are_reproducible_and_thread_independent() {
    let base = [
        "teleport-sim",
        "--resource",
        "kind=werner,d=2,mu=0.9",
        "--samples",
        "5000",
        "--seed",
        "5",
    ];
    let a = run(&[&base[..], &["--threads", "1"]].concat());
    let b = run(&[&base[..], &["--threads", "1"]].concat());
    let c = run(&[&base[..], &["--threads", "3"]].concat());
    assert_eq!(stable(json(&a)), stable(json(&b)));
    assert_eq!(json(&a)["report"], json(&c)["report"]);
}

#[test]
fn csv_is_a_flat_projection_of_json() {
    let args = [
        "edist",
        "--state",
        "kind=werner,d=2,mu=0.7",
        "--d",
        "2",
        "--restarts",
        "2",
    ];
    let j = json(&run(&args));
    let out = run(&[&args[..], &["--format", "csv"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["key", "value"]);
    let rows: Vec<(String, String)> = rdr.deserialize().map(Result::unwrap).collect();
    let e = rows
        .iter()
        .find(|(k, _)| k == "report.e_lower")
        .expect("e_lower row");
    assert_eq!(
        e.1.parse::<f64>().unwrap(),
        j["report"]["e_lower"].as_f64().unwrap()
    );
    assert!(rows
        .iter()
        .any(|(k, v)| k == "manifest.command" && v == "edist"));
}

#[test]
fn output_file_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "lemma-check",
        "--trials",
        "200",
        "--mu",
        "0.8",
        "--mu-trials",
        "50",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["manifest"]["command"], "lemma-check");
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn file_inputs_are_digested() {
    let path = data("werner_mu_0.8.json");
    let out = run(&["edist", "--state", &path, "--d", "2", "--restarts", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let digest = v["manifest"]["input_digests"][0]["sha256"]
        .as_str()
        .unwrap();
    assert_eq!(digest.len(), 64);
    assert!((v["report"]["e_lower"].as_f64().unwrap() - 0.8).abs() <= 1e-6);
}

#[test]
fn witness_detects_the_demo_sigma() {
    let out = run(&[
        "witness",
        "--rho",
        &data("demo_rho.json"),
        "--lambda",
        "0.6",
        "--d",
        "2",
        "--sigma",
        "kind=werner,d=2,mu=0.8",
        "--samples",
        "2000",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["report"]["detected"], true);
    assert!((v["report"]["detection_value"].as_f64().unwrap() + 0.05).abs() <= 1e-9);
    assert!(v["report"]["min_over_products"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"], &["activate", "--help"]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(!out.stdout.is_empty());
    }
}
