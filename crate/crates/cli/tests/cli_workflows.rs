use std::path::Path;
use std::process::{Command, Output};

use twoproduct_cli::report::parse_report;

fn twoproduct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoproduct"))
        .args(args)
        .env_remove("TWOPRODUCT_REPORT_DIR")
        .output()
        .expect("binary runs")
}

fn verify_to(path: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["verify", "--report", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    twoproduct(&args)
}

const FAST: [&str; 4] = ["--suite", "quantion-norms", "--suite", "minimizer-nonuniqueness"];

#[test]
fn suites_lists_every_anchor_and_expectation() {
    let out = twoproduct(&["suites"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "identities-elliptic-phase",
        "ghost-hyperbolic",
        "envariance-transitivity",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    assert!(text
        .lines()
        .any(|l| l.starts_with("ghost-hyperbolic") && l.contains("witness")));
    assert_eq!(text.lines().count(), twoproduct_cli::suites::CATALOG.len());
}

#[test]
fn unknown_suite_is_a_config_error() {
    let out = twoproduct(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-suite"));
    let out = twoproduct(&["verify", "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn passing_run_and_identical_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(verify_to(&a, &FAST).status.code(), Some(0));
    assert_eq!(verify_to(&b, &FAST).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = twoproduct(&["diff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "no differences");
}

#[test]
fn seed_changes_witnesses_not_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let suites = ["--suite", "composition-nonzero-a"];
    verify_to(&a, &[&suites[..], &["--seed", "1"]].concat());
    verify_to(&b, &[&suites[..], &["--seed", "2"]].concat());
    let (ra, rb) = (
        parse_report(&std::fs::read_to_string(&a).unwrap()).unwrap(),
        parse_report(&std::fs::read_to_string(&b).unwrap()).unwrap(),
    );
    assert_eq!(ra.suites[0].verdict, rb.suites[0].verdict);
    assert_ne!(ra.suites[0].witnesses, rb.suites[0].witnesses);
}

#[test]
fn tightened_tolerance_shows_up_in_diff() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    std::fs::write(&cfg, "[tolerances]\nquantion = 1e-300\n").unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(verify_to(&a, &FAST).status.code(), Some(0));
    let strict = [&FAST[..], &["--config", cfg.to_str().unwrap()]].concat();
    assert_eq!(verify_to(&b, &strict).status.code(), Some(1));
    let out = twoproduct(&["diff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text
        .lines()
        .find(|l| l.starts_with("suite quantion-norms:"))
        .expect("suite listed");
    assert!(line.contains("verdict"), "{text}");
    assert!(text.contains("metadata: config"));
    assert!(!text.contains("minimizer-nonuniqueness"));
}

#[test]
fn version_only_change_is_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    verify_to(&a, &FAST);
    let bumped = std::fs::read_to_string(&a).unwrap().replacen(
        &format!("\"version\": \"{}\"", env!("CARGO_PKG_VERSION")),
        "\"version\": \"0.0.0-test\"",
        1,
    );
    std::fs::write(&b, bumped).unwrap();
    let out = twoproduct(&["diff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.starts_with("metadata-only changes") && text.contains("metadata: version"),
        "{text}"
    );
}

#[test]
fn schema_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    verify_to(&a, &FAST);
    std::fs::write(&b, "{\"schema_version\": 0, \"suites\": []}").unwrap();
    let out = twoproduct(&["diff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema mismatch"));
}

#[test]
fn report_dir_from_environment_and_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_twoproduct"))
        .args(["verify", "--format", "md"])
        .args(FAST)
        .env("TWOPRODUCT_REPORT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let md = std::fs::read_to_string(dir.path().join("report.md")).unwrap();
    assert!(md.contains("| minimizer-nonuniqueness | witness | pass |"), "{md}");
}

#[test]
fn expected_pass_failure_exits_one() {
    // The literal commutator correspondence measures −I, not I.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = verify_to(
        &path,
        &["--suite", "berezin-correspondence", "--suite", "berezin-quantization"],
    );
    assert_eq!(out.status.code(), Some(1));
    let r = parse_report(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let corr = r.suites.iter().find(|s| s.name == "berezin-correspondence").unwrap();
    assert_eq!(corr.notes["observed diagonal"], "-1.000000000");
    assert!(r
        .suites
        .iter()
        .any(|s| s.name == "berezin-quantization" && s.verdict == twoproduct_cli::Verdict::Pass));
}

#[test]
fn stdout_report_when_no_destination() {
    let out = twoproduct(&["verify", "--suite", "minimizer-nonuniqueness"]);
    assert_eq!(out.status.code(), Some(0));
    let r = parse_report(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(r.suites.len(), 1);
    assert!(!r.suites[0].witnesses.is_empty());
}
