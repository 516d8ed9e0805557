use std::fs;
use std::process::Command;

use efron_dual::cli::{read_reports, reports_to_json, run, CSV_HEADER};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_efron-dual"));
    c.env_remove("EFRON_DUAL_SEED");
    c
}

fn exit_of(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

fn run_capture(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["efron-dual"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn verify_sym_exit_codes() {
    assert_eq!(exit_of(&["verify-sym", "--k-max", "12"]), 0);
    assert_eq!(exit_of(&["verify-sym", "--k-max", "1"]), 0);
    assert_eq!(exit_of(&["verify-sym", "--k-max", "0"]), 2);
    assert_eq!(exit_of(&["verify-sym"]), 2);
}

#[test]
fn verify_dual_exit_codes() {
    assert_eq!(exit_of(&["verify-dual", "--k-max", "64"]), 0);
    assert_eq!(exit_of(&["verify-dual", "--k-max", "0"]), 0);
    assert_eq!(exit_of(&["verify-dual", "--k-max", "2.5"]), 2);
    assert_eq!(exit_of(&["verify-dual", "--k-max", "-1"]), 2);
}

#[test]
fn summary_formats() {
    let (code, text) = run_capture(&["verify-sym", "--k-max", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    let (_, csv) = run_capture(&["verify-dual", "--k-max", "2", "--format", "csv"]);
    assert!(csv.starts_with("suite,cases,failures\n"));
}

#[test]
fn check_usage_errors() {
    assert_eq!(exit_of(&["check", "--identity", "product-eq2", "--body", "cube3", "--n", "0", "--k", "9"]), 2);
    assert_eq!(exit_of(&["check", "--identity", "eq7", "--body", "cube3", "--n", "2"]), 2);
    assert_eq!(exit_of(&["check", "--identity", "efron-eq1", "--body", "cube3", "--n", "2", "--reps", "0"]), 2);
    assert_eq!(exit_of(&["check", "--identity", "efron-eq1", "--body", "cube3", "--n", "x"]), 2);
    assert_eq!(exit_of(&["check", "--identity", "efron-eq1", "--body", "cube3", "--n", "2", "--format", "xml"]), 2);
    assert_eq!(exit_of(&["check", "--config", "/nonexistent/run.cfg"]), 2);
    assert_eq!(exit_of(&["frobnicate"]), 2);
    assert_eq!(exit_of(&["--help"]), 0);
}

#[test]
fn check_reports_and_exact_target() {
    let (code, text) = run_capture(&[
        "check", "--identity", "factorial-eq3", "--body", "interval", "--n", "3", "--k", "2", "--reps", "200000", "--seed", "7",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["exact_target"], 0.3);
    assert_eq!(v["parameters"]["n"], 3);
    assert_eq!(v["lhs"]["reps"], 200000);
    for key in ["identity", "body", "parameters", "lhs", "rhs", "z_score", "tolerance_sigma", "pass", "master_seed", "artifact_version"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn statistical_failure_exits_one() {
    // A tolerance far below sampling noise forces a failing verdict.
    let code = exit_of(&[
        "check", "--identity", "efron-eq1", "--body", "square", "--n", "4", "--reps", "2000", "--seed", "3",
        "--tolerance-sigma", "1e-9",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn seed_precedence_through_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "identity = efron-eq1\nbody = triangle\nn = 3\nreps = 500\n").unwrap();
    let seed_of = |extra: &[&str], env: Option<&str>| -> u64 {
        let mut c = bin();
        c.args(["check", "--config", cfg.to_str().unwrap()]).args(extra);
        if let Some(e) = env {
            c.env("EFRON_DUAL_SEED", e);
        }
        let out = c.output().unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["master_seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of(&[], None), 1);
    assert_eq!(seed_of(&[], Some("123")), 123);
    assert_eq!(seed_of(&["--seed", "9"], Some("123")), 9);
    fs::write(&cfg, "identity = efron-eq1\nbody = triangle\nn = 3\nreps = 500\nseed = 55\n").unwrap();
    assert_eq!(seed_of(&[], Some("123")), 55);
}

#[test]
fn report_merge_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let common = ["--reps", "2000", "--seed", "11"];
    let mut args = vec!["check", "--identity", "efron-eq1", "--body", "triangle", "--n", "3", "--out", a.to_str().unwrap()];
    args.extend(common);
    assert_eq!(run_capture(&args).0, 0);
    let mut args = vec!["check", "--identity", "thm2-direct-vs-ratio", "--body", "square", "--m", "4", "--j", "2", "--mode", "independent", "--out", b.to_str().unwrap()];
    args.extend(common);
    assert_eq!(run_capture(&args).0, 0);

    let (code, merged) = run_capture(&["report", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code, 0);
    let merged_path = dir.path().join("merged.json");
    fs::write(&merged_path, &merged).unwrap();
    let parsed = read_reports(&merged_path).unwrap();
    assert_eq!(parsed.len(), 2);
    assert_eq!(reports_to_json(&parsed), merged);
    let (_, again) = run_capture(&["report", merged_path.to_str().unwrap()]);
    assert_eq!(again, merged);

    let single = fs::read_to_string(&a).unwrap();
    let one = read_reports(&a).unwrap();
    assert_eq!(serde_json::to_string_pretty(&one[0]).unwrap() + "\n", single);

    let (code, csv) = run_capture(&["report", "--format", "csv", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CSV_HEADER.join(","));
}

#[test]
fn report_edge_cases() {
    assert_eq!(run_capture(&["report"]), (0, "[]\n".to_string()));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"identity\": \"efron-eq1\"").unwrap();
    assert_eq!(exit_of(&["report", bad.to_str().unwrap()]), 2);
    fs::write(&bad, "{\"identity\": \"efron-eq1\"}").unwrap();
    assert_eq!(exit_of(&["report", bad.to_str().unwrap()]), 2);
    assert_eq!(exit_of(&["report", "/nonexistent/report.json"]), 2);
}

mod round_trip {
    use efron_dual::cli::{read_reports, reports_to_json};
    use efron_dual::montecarlo::{IdentityKind, IdentityReport, Mode, MomentEstimate, Parameters};
    use proptest::prelude::*;

    fn estimate() -> impl Strategy<Value = MomentEstimate> {
        (any::<f64>().prop_filter("finite", |x| x.is_finite()), 0.0f64..1e3, 1u64..u64::MAX, any::<u64>()).prop_map(
            |(mean, stderr, replications, master_seed)| MomentEstimate {
                estimand: "E x".into(),
                mean,
                stderr,
                replications,
                master_seed,
            },
        )
    }

    proptest! {
        #[test]
        fn serialize_parse_serialize_is_identical(
            lhs in estimate(),
            rhs in estimate(),
            z in prop_oneof![Just(f64::INFINITY), 0.0f64..1e9],
            kind in prop::sample::select(IdentityKind::ALL.to_vec()),
            independent in any::<bool>(),
            target in prop::option::of(any::<f64>().prop_filter("finite", |x| x.is_finite())),
        ) {
            let report = IdentityReport {
                identity: kind,
                body: "square".into(),
                mode: if independent { Mode::Independent } else { Mode::Coupled },
                parameters: Parameters { n: Some(2), k: Some(3), m: None, j: None },
                lhs,
                rhs,
                z_score: z,
                tolerance_sigma: 4.0,
                pass: z <= 4.0,
                master_seed: 1,
                artifact_version: "0.1.0".into(),
                exact_target: target,
            };
            let text = reports_to_json(std::slice::from_ref(&report));
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("r.json");
            std::fs::write(&path, &text).unwrap();
            let parsed = read_reports(&path).unwrap();
            prop_assert_eq!(&parsed[0], &report);
            prop_assert_eq!(reports_to_json(&parsed), text);
        }
    }
}
