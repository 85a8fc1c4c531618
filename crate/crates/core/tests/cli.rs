//! End-to-end checks of the command-line surface: exit codes, stream
//! separation, document schemas, and the on-disk artifact set.

use std::path::PathBuf;
use std::process::{Command, Output};

use sswkb::io::Summary;

const BENCH: &str = r#"{"family":"pow_core_pow_tail","a":6,"b":4}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sswkb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sswkb-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_emits_summary_and_clean_exit() {
    let out = run(&["solve", "--spec", BENCH, "--k", "1", "--l", "0", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty(), "stderr not empty: {:?}", String::from_utf8_lossy(&out.stderr));
    let summary: Summary = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary.verdict, sswkb::Verdict::Converged);
    assert!((summary.big_r - 1.344_410_656_490_327_8).abs() < 1e-10);
    assert_eq!(summary.orders, [4, 4]);
    assert!(summary.oracle_logderiv_dev.is_none());
    assert!(summary.matching_residuals.value < 1e-10);
}

#[test]
fn oracle_flag_adds_the_deviation_field() {
    let out = run(&["solve", "--spec", BENCH, "--k", "1", "--l", "0", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: Summary = serde_json::from_slice(&out.stdout).unwrap();
    let dev = summary.oracle_logderiv_dev.expect("deviation present under --oracle");
    assert!(dev.is_finite() && dev < 0.05, "deviation {dev}");
}

#[test]
fn strict_flags_unestablished_convergence() {
    // Exponential tail at l = 0: the outer limit weight grows with the core
    // strength and crosses the convergence threshold near A = 1e4.
    let spec = r#"{"family":"exp_core_exp_tail","a":10000,"b":1}"#;
    let strict = run(&["solve", "--spec", spec, "--k", "1", "--l", "0", "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
    let summary: Summary = serde_json::from_slice(&strict.stdout).unwrap();
    assert_eq!(summary.verdict, sswkb::Verdict::ConvergenceNotEstablished);
    // Without --strict the same run exits cleanly.
    let lax = run(&["solve", "--spec", spec, "--k", "1", "--l", "0"]);
    assert_eq!(lax.status.code(), Some(0));
}

#[test]
fn errors_go_to_stderr_as_json() {
    let out = run(&["solve", "--spec", r#"{"family":"pow_core_pow_tail","a":3,"b":4}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(doc["error"]["kind"], "invalid_spec");
    assert!(doc["error"]["message"].as_str().unwrap().contains("a > 4"));

    let garbled = run(&["solve", "--spec", "{not json"]);
    assert_eq!(garbled.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&garbled.stderr).unwrap();
    assert_eq!(doc["error"]["kind"], "parse");
}

#[test]
fn solve_out_writes_the_artifact_set() {
    let dir = scratch_dir("solve");
    let out = run(&[
        "solve", "--spec", BENCH, "--k", "1", "--l", "0", "--oracle",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for name in ["summary.json", "basis.csv", "solution.csv", "oracle.csv", "comparison.csv"] {
        let p = dir.join(name);
        assert!(p.is_file(), "missing artifact {name}");
        assert!(std::fs::metadata(&p).unwrap().len() > 0, "empty artifact {name}");
    }
    let sol = std::fs::read_to_string(dir.join("solution.csv")).unwrap();
    assert!(sol.starts_with("t,region,u,u_prime\n"));
    assert!(sol.contains(",inner,") && sol.contains(",outer,"));
    let orc = std::fs::read_to_string(dir.join("oracle.csv")).unwrap();
    assert!(orc.starts_with("t,u_scaled,uprime_scaled,scale_exp2\n"));
    // Stored summary equals the stdout document.
    let stored: Summary =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    let (streamed, _) = {
        let solo = run(&["solve", "--spec", BENCH, "--k", "1", "--l", "0", "--oracle"]);
        (serde_json::from_slice::<Summary>(&solo.stdout).unwrap(), solo)
    };
    assert_eq!(
        serde_json::to_string(&stored).unwrap(),
        serde_json::to_string(&streamed).unwrap()
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_runs_the_grid_in_order() {
    let out = run(&[
        "sweep", "--spec", BENCH, "--k", "1", "--l", "0",
        "--a-grid", "100,1000,10000", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "A,R,R_asym,P_eps,P_tau,zero_order_dev,delta_l,error"
    );
    let first_cols: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first_cols[0], "100");
    let rest: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rest, ["1000", "10000"], "rows out of grid order");
}

#[test]
fn sweep_needs_at_least_two_points() {
    let out = run(&["sweep", "--spec", BENCH, "--a-grid", "100"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(doc["error"]["message"]
        .as_str()
        .unwrap()
        .contains("at least two"));
}

#[test]
fn check_speaks_tap_and_filters() {
    let out = run(&["check", "--spec", BENCH, "--k", "1", "--l", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let plan = lines.next().unwrap();
    assert!(plan.starts_with("1.."), "missing TAP plan: {plan}");
    let n: usize = plan[3..].parse().unwrap();
    assert!(n >= 10);
    for (i, line) in lines.enumerate() {
        assert!(
            line.starts_with(&format!("ok {} - ", i + 1)),
            "unexpected TAP line: {line}"
        );
    }

    let filtered = run(&["check", "--spec", BENCH, "--filter", "wronskian"]);
    let text = String::from_utf8(filtered.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "1..2");
    assert!(text.contains("inner_wronskian_constant"));
    assert!(text.contains("outer_wronskian_constant"));
    assert!(!text.contains("join_continuity"));
}

#[test]
fn check_reports_rejected_specs_as_failures() {
    let out = run(&["check", "--spec", r#"{"family":"exp_core_pow_tail","a":1,"b":2}"#]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "1..1");
    assert!(text.contains("not ok 1 - spec_admissible"));
}

#[test]
fn asym_reports_limit_quantities() {
    let out = run(&["asym", "--spec", BENCH, "--k", "1", "--l", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in [
        "big_r", "r_asym", "radius_residual", "radius_rel_dev", "t_max",
        "p_eps_asym", "p_tau_asym", "c0_limit", "s0_limit",
    ] {
        assert!(doc[key].is_number(), "missing field {key}");
    }
    assert_eq!(doc["four_cycle_consistent"], true);
    assert_eq!(doc["verdict"], "converged");
}

#[test]
fn oracle_dumps_the_direct_wave() {
    let out = run(&["oracle", "--spec", BENCH, "--k", "1", "--l", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["t_start"].as_f64().unwrap() > 0.0);
    assert!(doc["steps"].as_u64().unwrap() > 100);
    assert!(doc["join_logderiv"].is_number());

    let csv = run(&["oracle", "--spec", BENCH, "--k", "1", "--l", "0", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("t,u_scaled,uprime_scaled,scale_exp2\n"));
    assert!(text.lines().count() > 100);
}

#[test]
fn help_and_bad_flags_use_conventional_exits() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8(help.stdout).unwrap();
    for sub in ["solve", "sweep", "asym", "oracle", "check"] {
        assert!(text.contains(sub), "help missing subcommand {sub}");
    }
    let bad = run(&["solve", "--no-such-flag"]);
    assert_eq!(bad.status.code(), Some(1));
}
