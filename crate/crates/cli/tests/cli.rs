use std::path::Path;
use std::process::{Command, Output};

use qcorr_cli::io::{read_channel, read_state};
use qcorr_core::channels::amplitude_damping;
use qcorr_core::states::rank2_qc_state;
use qcorr_core::Rank2QCParams;
use serde_json::Value;

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .and_then(|v| v.split_whitespace().next())
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ad_numeric_and_analytic_agree() {
    let out = qcorr(&["qcp", "--channel", "ad", "--p", "0.5", "--measure", "discord", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!((field(&text, "numeric") - field(&text, "analytic")).abs() <= 1e-4);
    assert!(field(&text, "abs_diff") <= 1e-4);
}

#[test]
fn pd_creates_nothing() {
    let out = qcorr(&["qcp", "--channel", "pd", "--p", "0.5", "--measure", "discord"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(field(&stdout(&out), "numeric").abs() <= 1e-6);
}

#[test]
fn maxqcp_json_report() {
    let out = qcorr(&["qcp", "--channel", "maxqcp", "--measure", "discord", "--method", "both", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let numeric = v["numeric"]["value"].as_f64().unwrap();
    assert!((numeric - 0.2017).abs() < 1e-4, "{numeric}");
    assert!(v["abs_diff"].as_f64().unwrap() < 1e-6);
    // keys are written in declaration order, not sorted
    let text = stdout(&out);
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("channel") < pos("measure") && pos("measure") < pos("numeric") && pos("analytic") < pos("abs_diff"));
}

#[test]
fn bad_flags_exit_one() {
    for args in [
        vec!["qcp", "--channel", "xyz", "--p", "0.5"],
        vec!["qcp", "--channel", "ad"],
        vec!["qcp", "--channel", "ad", "--p", "1.5"],
        vec!["qcp", "--channel", "ad", "--p", "0.5", "--measure", "entropy"],
        vec!["qcp", "--channel", "file:/nonexistent/channel.json"],
        vec!["sweep", "--steps", "1"],
        vec!["sweep", "--start", "-0.5"],
        vec!["frobnicate"],
    ] {
        assert_eq!(qcorr(&args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(qcorr(&["--help"]).status.code(), Some(0));
}

#[test]
fn channel_schema_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"name":"half","dim_in":2,"dim_out":2,"kraus":[[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]}"#).unwrap();
    let spec = format!("file:{}", path_str(&path));
    let out = qcorr(&["qcp", "--channel", &spec]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid channel"));
}

#[test]
fn channel_round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ad.json");
    assert_eq!(qcorr(&["export-channel", "--channel", "ad", "--p", "0.3", "--out", path_str(&path)]).status.code(), Some(0));
    let back = read_channel(&path).unwrap();
    let reference = amplitude_damping(0.3).unwrap();
    for (a, b) in back.kraus().iter().zip(reference.kraus()) {
        assert!(a.max_abs_diff(b) <= 1e-12);
    }

    let spec = format!("file:{}", path_str(&path));
    let from_file = qcorr(&["qcp", "--channel", &spec, "--json"]);
    let builtin = qcorr(&["qcp", "--channel", "ad", "--p", "0.3", "--json"]);
    let a: Value = serde_json::from_slice(&from_file.stdout).unwrap();
    let b: Value = serde_json::from_slice(&builtin.stdout).unwrap();
    assert!((a["numeric"]["value"].as_f64().unwrap() - b["numeric"]["value"].as_f64().unwrap()).abs() <= 1e-12);
}

#[test]
fn state_round_trip_and_measure() {
    let dir = tempfile::tempdir().unwrap();
    let rank2 = dir.path().join("rank2.json");
    let status = qcorr(&["export-state", "--kind", "rank2", "--t", "0", "--phi", "0.7853981633974483", "--out", path_str(&rank2)]);
    assert_eq!(status.status.code(), Some(0));
    let back = read_state(&rank2).unwrap();
    let reference = rank2_qc_state(&Rank2QCParams::new(0.0, std::f64::consts::FRAC_PI_4).unwrap());
    assert!(back.max_abs_diff(&reference) <= 1e-12);
    assert_eq!(back.dims(), &[2, 2]);

    let spec = format!("file:{}", path_str(&rank2));
    let out = qcorr(&["measure", "--state", &spec, "--measure", "discord"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((field(&stdout(&out), "discord") - 0.2017).abs() < 1e-4);

    let bell = dir.path().join("bell.json");
    qcorr(&["export-state", "--kind", "bell", "--out", path_str(&bell)]);
    let out = qcorr(&["measure", "--state", path_str(&bell)]);
    let text = stdout(&out);
    assert!((field(&text, "discord") - 1.0).abs() < 1e-8);
    assert!((field(&text, "deficit") - 1.0).abs() < 1e-8);

    let cc = dir.path().join("cc.json");
    qcorr(&["export-state", "--kind", "cc", "--q", "0.3", "--chi", "0.4", "--phi", "1.0", "--out", path_str(&cc)]);
    let out = qcorr(&["measure", "--state", path_str(&cc), "--measure", "both"]);
    assert!(field(&stdout(&out), "discord").abs() < 1e-8);
    assert!(field(&stdout(&out), "deficit").abs() < 1e-8);
}

#[test]
fn non_psd_state_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"dims":[2,2],"rho":[[[1.2,0],[0,0],[0,0],[0,0]],[[0,0],[-0.2,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#,
    )
    .unwrap();
    assert_eq!(qcorr(&["measure", "--state", path_str(&path)]).status.code(), Some(1));
}

#[test]
fn sweep_endpoints_only() {
    let out = qcorr(&["sweep", "--steps", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "p,qcp_discord,qcp_deficit\n0,0,0\n1,0,0\n");
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = qcorr(&["sweep", "--steps", "21", "--chi", "--out", path_str(path)]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());

    let text = String::from_utf8(text).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,qcp_discord,qcp_deficit,chi"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 21);
    for pair in rows.windows(2) {
        assert!(pair[0][0] < pair[1][0]);
        // the optimal angle moves from π/4 toward 0
        assert!(pair[1][3] <= pair[0][3] + 1e-9);
    }
    assert!(rows[0][1].abs() <= 1e-9 && rows[20][1].abs() <= 1e-9);
}

#[test]
fn sweep_numeric_matches_analytic() {
    let numeric = qcorr(&["sweep", "--steps", "3", "--measure", "discord", "--method", "numeric"]);
    let analytic = qcorr(&["sweep", "--steps", "3", "--measure", "discord"]);
    assert_eq!(numeric.status.code(), Some(0));
    let parse = |o: &Output| -> Vec<f64> {
        stdout(o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
    };
    for (n, a) in parse(&numeric).iter().zip(parse(&analytic)) {
        assert!((n - a).abs() <= 1e-4);
    }
}

#[test]
fn sweep_unwritable_path() {
    let out = qcorr(&["sweep", "--steps", "2", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn superact_report() {
    let out = qcorr(&["superact", "--p", "0.5", "--samples", "2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["commutator"]["matches"], Value::Bool(true));
    assert!(v["pairwise_checks"].as_array().unwrap().iter().all(|c| c["holds"] == Value::Bool(true)));
    assert!(v["deficit_bound"].as_f64().unwrap() > 1e-4);
    assert_eq!(v["output_state"]["dims"], serde_json::json!([2, 2, 2, 2]));

    let zero = qcorr(&["superact", "--p", "0", "--samples", "0"]);
    assert_eq!(zero.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&zero.stdout).unwrap();
    assert!(v["commutator"]["norm"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["all_checks_pass"], Value::Bool(true));

    let bad = qcorr(&["superact", "--p", "1.5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("outside its domain"));
}

#[test]
fn check_channel_reports_probe() {
    let out = qcorr(&["check-channel", "--channel", "pd", "--p", "0.4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("unital: true"));
    assert!(text.contains("no witness"));
}
