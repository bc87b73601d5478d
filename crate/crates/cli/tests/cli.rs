use std::process::{Command, Output};

use serde_json::Value;

fn cvbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvbell"))
        .args(args)
        .env_remove("CVBELL_OUT_DIR")
        .output()
        .expect("cvbell runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn optimize_gbw_tmss_reaches_limit() {
    let o = cvbell(&["--no-timestamp", "optimize", "--state", "tmss", "--formalism", "gbw", "--param", "5", "--seed", "7"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["config", "results", "diagnostics"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let value = v["results"][0]["value"].as_f64().unwrap();
    let limit = 8.0 / 3f64.powf(9.0 / 8.0);
    assert!((value - limit).abs() < 1e-6 && value <= limit + 1e-12, "{value}");
    assert_eq!(v["config"]["formalism"], "gbw");
    assert_eq!(v["diagnostics"]["within_quantum_bounds"], true);
}

#[test]
fn optimize_diagnostics_include_oracle_residual() {
    let o = cvbell(&["--no-timestamp", "optimize", "--state", "ecs", "--formalism", "pseudospin", "--param", "1", "--restarts", "4"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = v["diagnostics"]["analytic_vs_matrix"].as_f64().unwrap();
    assert!(r < 1e-9, "{r}");
    assert!(v["diagnostics"]["tail_mass"].as_f64().unwrap() < 1e-10);
}

#[test]
fn figure_1b_csv_schema() {
    let o = cvbell(&["--no-timestamp", "figure", "--id", "1b", "--points", "5", "--format", "csv"]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("abs_alpha,P_n1,P_n2,P_n3"));
    assert_eq!(lines.clone().count(), 5);
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    for (v, e) in first.iter().zip([0.0, -1.0, 1.0, -1.0]) {
        assert!((v - e).abs() < 1e-12);
    }
}

#[test]
fn figure_1a_csv_schema() {
    let o = cvbell(&["--no-timestamp", "figure", "--id", "1a", "--points", "3", "--restarts", "2", "--format", "csv"]);
    let s = stdout(&o);
    assert_eq!(s.lines().next(), Some("r,B_bw,B_gbw,B_pseudospin"));
    assert_eq!(s.lines().count(), 4);
}

#[test]
fn timestamp_line_is_optional() {
    let args = ["fidelity", "--param", "1", "--format", "csv"];
    let stamped = stdout(&cvbell(&args));
    assert!(stamped.starts_with("# generated_unix="));
    let mut plain_args = vec!["--no-timestamp"];
    plain_args.extend(args);
    let plain = stdout(&cvbell(&plain_args));
    assert!(plain.starts_with("gamma,fidelity,k,abs_diff,cutoff\n"));
    assert_eq!(stamped.lines().skip(1).collect::<Vec<_>>(), plain.lines().collect::<Vec<_>>());
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "--no-timestamp", "sweep", "--state", "ecs", "--formalism", "ch_q", "--from", "0.5", "--to", "1.5",
        "--points", "3", "--restarts", "4", "--seed", "3", "--format", "csv",
    ];
    let a = stdout(&cvbell(&args));
    let b = stdout(&cvbell(&args));
    assert_eq!(a, b);
    assert_eq!(a.lines().next(), Some("param,value,a_re,a_im,a_prime_re,a_prime_im,b_re,b_im,b_prime_re,b_prime_im,converged"));
    assert_eq!(a.lines().count(), 4);
}

#[test]
fn fidelity_matches_k() {
    let o = cvbell(&["--no-timestamp", "fidelity", "--param", "0.3", "1", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let diag = v["diagnostics"].as_array().unwrap();
    assert_eq!(diag.len(), 3);
    for d in diag {
        assert!(d["abs_diff"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn unsupported_combination_is_a_usage_error() {
    let o = cvbell(&["optimize", "--state", "single_photon", "--formalism", "gbw"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("unsupported"), "{err}");
    assert!(o.stdout.is_empty());

    let o = cvbell(&["sweep", "--state", "single_photon", "--formalism", "ch_q", "--from", "0", "--to", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(cvbell(&["optimize", "--state", "tmss", "--formalism", "nope"]).status.code(), Some(2));
    assert_eq!(cvbell(&["figure", "--id", "4c"]).status.code(), Some(2));
    assert_eq!(cvbell(&["optimize", "--state", "ecs", "--formalism", "gbw", "--param", "0"]).status.code(), Some(2));
    assert_eq!(cvbell(&["verify", "--check", "13"]).status.code(), Some(2));
}

#[test]
fn out_dir_env_sets_default_destination() {
    let dir = std::env::temp_dir().join(format!("cvbell-out-{}", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_cvbell"))
        .args(["--no-timestamp", "figure", "--id", "2b", "--points", "4", "--format", "csv"])
        .env("CVBELL_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(dir.join("figure-2b.csv")).unwrap();
    assert!(written.starts_with("alpha_im,P_gamma2,P_gamma5\n"));

    // an explicit path wins
    let explicit = dir.join("explicit.json");
    let o = Command::new(env!("CARGO_BIN_EXE_cvbell"))
        .args(["figure", "--id", "2b", "--points", "4", "--out"])
        .arg(&explicit)
        .env("CVBELL_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&explicit).unwrap()).unwrap();
    assert!(v["generated_unix"].is_u64());
    assert_eq!(v["results"]["id"], "2b");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_single_check() {
    let o = cvbell(&["verify", "--check", "5"]);
    let s = stdout(&o);
    assert!(s.starts_with("PASS  5"));
    assert!(s.ends_with("1/1 checks passed\n"));
}
