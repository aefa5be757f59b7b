//! End-to-end runs of the `modfront` binary: exit codes, config handling,
//! output records and determinism.

use modfront_cli::config::{parse_config, Overrides, RunConfig};
use modfront_core::bifurcation::find_hopf;
use modfront_core::model::{ModelParams, ScenarioTag};
use proptest::prelude::*;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn modfront(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modfront")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON record")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn wave_amplitude_at_onset() {
    let v = json(&modfront(&["wave", "--alpha0", "1", "--cu", "1", "--B", "0", "--epsilon", "0"]));
    assert!((v["A_star_squared"].as_f64().unwrap() - 0.325).abs() < 1e-12);
    assert!((v["omega0_star"].as_f64().unwrap() + 1.0 / 60.0).abs() < 1e-12);
}

#[test]
fn hopf_record_matches_the_library() {
    let v = json(&modfront(&["bifurcate", "--alpha0", "1", "--cu", "1", "--find", "hopf"]));
    let c0 = v["hopf"]["c0"].as_f64().unwrap();
    let lib = find_hopf(&ModelParams { alpha0: 1.0, cu: 1.0, ..ModelParams::default() }, ScenarioTag::II, (1.1, 2.5)).unwrap();
    assert_eq!(c0, lib.c0);
    assert!(v["hopf"]["certificate"]["re"].as_f64().unwrap().abs() < 1e-10);
    assert!(v["hopf"]["certificate"]["im"].as_f64().unwrap() > 0.0);
    assert!(v.get("torus").is_none());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = modfront(&["wave", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    assert_eq!(modfront(&[]).status.code(), Some(2));
}

#[test]
fn help_succeeds() {
    let out = modfront(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["spectrum", "wave", "reduced", "shoot", "bifurcate", "front", "simulate", "verify"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn domain_error_reports_its_name() {
    let out = modfront(&["wave", "--alpha0", "-2", "--epsilon", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("NoWave:"));
    let out = modfront(&["reduced", "--scenario", "III", "--c0", "1", "--cv", "-4", "--gamma2", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("Gamma2NotZero:"));
}

#[test]
fn missing_scenario_is_a_usage_error() {
    let out = modfront(&["shoot"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("UsageError"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "# wave at onset\nalpha0 = 1\ncu = 2\nB = 0\nepsilon = 0\n");
    let v = json(&modfront(&["wave", "--config", &cfg]));
    let cu2: f64 = 4.0;
    let expected = (9.0 + 4.0 * cu2) / (4.0 * (7.0 + 3.0 * cu2));
    assert!((v["A_star_squared"].as_f64().unwrap() - expected).abs() < 1e-12);
    let v = json(&modfront(&["wave", "--config", &cfg, "--cu", "1"]));
    assert!((v["A_star_squared"].as_f64().unwrap() - 0.325).abs() < 1e-12);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "alpha0 = 1\nspeed = 3\n");
    let out = modfront(&["wave", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key \"speed\""));
}

#[test]
fn malformed_config_never_crashes() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in ["cu", "cu = one", "scenario = VII", "\u{0}=\u{0}", "cu=1\ncu=1"].iter().enumerate() {
        let cfg = write(dir.path(), &format!("m{i}.cfg"), text);
        let out = modfront(&["wave", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(2), "{text:?}");
    }
    let out = modfront(&["wave", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

fn csv_header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn shoot_writes_trajectory_and_classification() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let v = json(&modfront(&["shoot", "--c", "-2", "--cu", "0.5", "--out", &out_dir, "--samples", "101"]));
    assert_eq!(v["classification"], "Origin");
    assert_eq!(v["form"], "S1Radius");
    assert_eq!(csv_header(&dir.path().join("trajectory.csv")), "t,r");
    let lines = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap().lines().count();
    assert_eq!(lines, 102);
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("shoot.json")).unwrap()).unwrap();
    assert_eq!(stored, v);
}

#[test]
fn identical_inputs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = d.path().display().to_string();
        let args = ["front", "--scenario", "II", "--c0", "2", "--epsilon", "0.05", "--gamma1", "0.02", "--seed", "11", "--snapshot", "3", "--out", &o];
        assert!(modfront(&args).status.success());
    }
    for f in ["front.json", "front.csv", "snapshot.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between identical runs");
    }
}

#[test]
fn every_csv_has_a_header_and_json_has_no_bare_numbers_in_arrays() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().display().to_string();
    let runs: [&[&str]; 4] = [
        &["spectrum", "--cu", "0.5", "--c", "-2", "--epsilon", "0.05", "--n-max", "32"],
        &["reduced", "--scenario", "V", "--cu", "1", "--cv", "-3", "--c0", "2", "--gamma1", "0.02"],
        &["bifurcate", "--find", "torus"],
        &["wave", "--epsilon", "0.1"],
    ];
    for args in runs {
        let mut full = args.to_vec();
        full.extend(["--out", &o]);
        let v = json(&modfront(&full));
        fn check(v: &Value, path: &str) {
            match v {
                Value::Array(items) => {
                    for (i, x) in items.iter().enumerate() {
                        assert!(!x.is_number(), "bare number at {path}[{i}]");
                        check(x, &format!("{path}[{i}]"));
                    }
                }
                Value::Object(m) => m.iter().for_each(|(k, x)| check(x, &format!("{path}.{k}"))),
                _ => {}
            }
        }
        check(&v, args[0]);
    }
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "csv") {
            let h = csv_header(&p);
            assert!(h.chars().next().unwrap().is_ascii_alphabetic(), "{} header {h:?}", p.display());
        }
    }
    assert_eq!(csv_header(&dir.path().join("branch.csv")).split(',').take(3).collect::<Vec<_>>(), ["c0", "period", "amplitude"]);
}

#[test]
fn verify_prints_a_table() {
    let out = modfront(&["verify", "--only", "3,12", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[PASS]  3") && text.contains("[PASS] 12"));
    assert!(text.contains("2/2 criteria passed"));
}

#[test]
fn verify_reports_failed_criteria_with_exit_one() {
    // Criterion 5 compares against a reference value this implementation does
    // not reproduce; the driver must surface that as a failure.
    let out = modfront(&["verify", "--only", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("AcceptanceFailed:"));
}

fn scenario_strategy() -> impl Strategy<Value = Option<(ScenarioTag, f64, f64, f64)>> {
    let tag = prop_oneof![
        Just(ScenarioTag::I),
        Just(ScenarioTag::II),
        Just(ScenarioTag::III),
        Just(ScenarioTag::IV),
        Just(ScenarioTag::V)
    ];
    proptest::option::of((tag, -5.0f64..5.0, 0.1f64..3.0, -1.0f64..1.0))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn run_config_round_trips(
        alpha0 in -2.0f64..3.0, cu in 0.1f64..3.0, cv in -5.0f64..5.0, gamma1 in -1.0f64..1.0, gamma2 in -1.0f64..1.0,
        epsilon in 0.0f64..0.3, b in -1.0f64..1.0, scenario in scenario_strategy(), seed in any::<u64>(),
    ) {
        let mut o = Overrides {
            alpha0: Some(alpha0), cu: Some(cu), cv: Some(cv), gamma1: Some(gamma1), gamma2: Some(gamma2),
            epsilon: Some(epsilon), b: Some(b), seed: Some(seed), ..Overrides::default()
        };
        if let Some((tag, c, c0, g20)) = scenario {
            o.scenario = Some(tag);
            o.c = Some(c);
            o.c0 = Some(c0);
            o.gamma2_0 = Some(g20);
        }
        let rc = RunConfig::resolve(&o, None).unwrap();
        let text = serde_json::to_string(&rc).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, rc);
        let again = RunConfig::resolve(&parse_config(&rc.to_config_text()).unwrap(), None).unwrap();
        prop_assert_eq!(again, rc);
    }
}
