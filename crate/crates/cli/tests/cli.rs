use std::path::PathBuf;
use std::process::Command;

use oddconn_cli::{parse_model, replay, resolve, run, serialize_model, Report, Status, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("oddconn").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_model(tag: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("oddconn-cli-{tag}-{}.model", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

const NON_INVOLUTIVE: &str = "\
chart even t
chart odd theta
rho t theta = 2
rho theta t = 1
gamma theta t t = t
gamma t theta t = 1
";

#[test]
fn catalog_entries_round_trip_through_model_files() {
    let (code, list, _) = cli(&["catalog", "list"]);
    assert_eq!(code, EXIT_PASS);
    let mut names: Vec<String> = list.lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    names.retain(|n| n != "canonical-rnn:<n>");
    names.extend(["canonical-rnn:2".into(), "canonical-rnn:3".into()]);
    assert!(names.len() >= 8);
    for name in &names {
        let (code, shown, err) = cli(&["catalog", "show", name]);
        assert_eq!(code, EXIT_PASS, "{name}: {err}");
        let parsed = parse_model(&shown).unwrap_or_else(|e| panic!("{name}: {e}"));
        let entry = resolve(name).unwrap();
        assert_eq!(parsed, entry.model, "{name}");
        assert_eq!(serialize_model(&parsed), serialize_model(&entry.model));
    }
}

#[test]
fn reports_are_deterministic_in_both_formats() {
    for format in ["text", "machine-readable"] {
        let args = ["verify", "weitzenbock:twisted-r22", "--suite", "all", "--seed", "3", "--trials", "8", "--format", format];
        let (c1, a, _) = cli(&args);
        let (c2, b, _) = cli(&args);
        assert_eq!((c1, c2), (EXIT_PASS, EXIT_PASS));
        assert_eq!(a, b);
    }
    let (_, a, _) = cli(&["verify", "susy-r11", "--seed", "1", "--format", "machine-readable"]);
    let (_, b, _) = cli(&["verify", "susy-r11", "--seed", "2", "--format", "machine-readable"]);
    assert_ne!(a, b);
    let r: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(r["seed"], 1);
    assert!(r.get("timing_ms").is_none());
    let (_, timed, _) = cli(&["verify", "susy-r11", "--timing", "--format", "machine-readable"]);
    assert!(timed.contains("timing_ms"));
}

#[test]
fn text_report_shape() {
    let (code, out, _) = cli(&["verify", "susy-r11", "--suite", "metric"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.lines().any(|l| l.starts_with("PASS  metric/compatibility")));
    assert!(out.trim_end().ends_with("1 passed, 0 failed, 0 skipped"));
    let p = temp_model("nometric", "chart even t\nchart odd theta\nrho t theta = 1\nrho theta t = 1\n");
    let (code, out, _) = cli(&["verify", p.to_str().unwrap(), "--suite", "metric"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("SKIP"), "{out}");
    let _ = std::fs::remove_file(p);
}

#[test]
fn corrupted_model_is_an_input_error() {
    let p = temp_model("bad", "chart even t\nchart odd theta\nrho t theta = 1\nrho theta t = 1\ngamma theta t t = theta\n");
    let (code, _, err) = cli(&["verify", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 5, column 19"), "{err}");
    let bin = Command::new(env!("CARGO_BIN_EXE_oddconn")).args(["verify", p.to_str().unwrap()]).output().unwrap();
    assert_eq!(bin.status.code(), Some(EXIT_INPUT));
    assert!(String::from_utf8_lossy(&bin.stderr).contains("line 5, column 19"));
    let p2 = temp_model("syntax", "chart even t\nrho t t = (t +\n");
    let (code, _, err) = cli(&["components", p2.to_str().unwrap(), "--object", "nabla"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 2"), "{err}");
    let _ = std::fs::remove_file(p);
    let _ = std::fs::remove_file(p2);
}

#[test]
fn binary_passes_on_catalog_entry() {
    let out = Command::new(env!("CARGO_BIN_EXE_oddconn")).args(["verify", "canonical-r11", "--trials", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PASS));
    assert!(String::from_utf8_lossy(&out.stdout).contains("summary:"));
}

#[test]
fn non_involutive_model_fails_with_replayable_witness() {
    let p = temp_model("noninv", NON_INVOLUTIVE);
    let path = p.to_str().unwrap();
    let (code, out, _) = cli(&["verify", path, "--suite", "tensoriality", "--format", "machine-readable"]);
    assert_eq!(code, EXIT_FAIL);
    let report: Report = serde_json::from_str(&out).unwrap();
    let subject = resolve(path).unwrap();
    let failed: Vec<_> = report.checks.iter().filter(|c| c.status == Status::Fail).collect();
    assert!(!failed.is_empty());
    for c in failed {
        let cx = c.counterexample.as_ref().expect("failing check carries a witness");
        let residual = replay(&subject, "tensoriality", &c.name, cx).unwrap();
        assert!(residual.is_some(), "{} does not reproduce", c.name);
    }
    let (code, out, _) = cli(&["verify", path, "--suite", "involution"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(out.contains("FAIL"));
    let (code, _, _) = cli(&["verify", path, "--suite", "axioms"]);
    assert_eq!(code, EXIT_PASS);
    let _ = std::fs::remove_file(p);
}

#[test]
fn unknown_names_are_input_errors() {
    for args in [
        vec!["verify", "susy-r11", "--suite", "nope"],
        vec!["verify", "no-such-entry"],
        vec!["components", "susy-r11", "--object", "nope"],
        vec!["components", "canonical-r11", "--object", "nabla", "--x", "missing"],
        vec!["catalog", "show", "canonical-rnn:x"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = cli(&args);
        assert_eq!(code, EXIT_INPUT, "{args:?}");
        assert!(!err.is_empty());
    }
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("verify"));
}

#[test]
fn component_tables() {
    let (code, out, _) = cli(&["components", "canonical-r11", "--object", "curvature"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("# 8 of 8 components vanish"));

    let (_, out, _) = cli(&["components", "smink44", "--object", "torsion"]);
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with("T(")).collect();
    assert_eq!(rows.len(), 36);
    for r in &rows {
        let both_p = r.starts_with("T(P") && r.contains(", P");
        if !both_p {
            assert!(r.ends_with("= 0"), "{r}");
        }
    }
    assert!(rows.iter().any(|r| r.contains("1/2")));

    let (_, out, _) = cli(&["components", "susy-r11", "--object", "divergence", "--basis", "coordinate"]);
    assert!(out.contains("basis: coordinate (d_t d_theta)"));

    let (_, out, _) = cli(&["components", "weitzenbock:twisted-r22", "--object", "christoffel"]);
    assert!(out.contains("corrected signs: 0 of 64 entries differ"));
    assert!(out.contains("literal signs: 12 of 64 entries differ"));

    let (code, _, err) = cli(&["components", "nonexistent.model", "--object", "nabla"]);
    assert_eq!(code, EXIT_INPUT, "{err}");

    let p = temp_model("fields", "chart even t\nchart odd theta\nrho t theta = 1\nrho theta t = 1\nfield X even t = t\n");
    let (code, out, _) = cli(&["components", p.to_str().unwrap(), "--object", "nabla", "--x", "X", "--y", "X", "--format", "machine-readable"]);
    assert_eq!(code, EXIT_PASS);
    let t: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(t["rows"][0]["key"], "nabla_X X");
    let _ = std::fs::remove_file(p);
}
