use std::path::Path;
use std::process::{Command, Output};

fn gsp4(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsp4")).arg("--cache").arg(cache).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eval_identities() {
    let dir = tempfile::tempdir().unwrap();
    let o = gsp4(dir.path(), &["eval", "cs", "--coweight", "0,0,0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1");
    let o = gsp4(dir.path(), &["eval", "zeta", "--data", "spherical"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = gsp4(dir.path(), &["eval", "zeta", "--data", "klingen", "--q", "1", "--r", "0", "--weights", "2,1", "--symbolic-p", "--expect", "closed-form"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn trace_suite_reports_variant_residual() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = gsp4(dir.path(), &["verify", "--suite", "trace", "--prime", "2", "--weights", "1,1", "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["version"], "1.0");
    let checks = json["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    for c in checks {
        assert_eq!(c["status"], "pass");
        for key in ["id", "paper_ref", "residual", "ms"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    let variant = checks.iter().find(|c| c["id"].as_str().unwrap().contains("variant")).unwrap();
    assert!(variant["residual"].as_str().is_some_and(|r| r != "0"));
}

#[test]
fn suites_from_the_examples() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "--suite", "eigenvectors", "--prime", "2", "--weights", "1,0"][..],
        &["verify", "--suite", "constants", "--symbolic-p", "--weights", "2,1", "--qr", "1,1"][..],
        &["verify", "--suite", "arithmetic"][..],
    ] {
        let o = gsp4(dir.path(), args);
        assert!(o.status.success(), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).contains(" 0 failed"));
    }
}

#[test]
fn configuration_errors_exit_before_work() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "--weights", "0,1"][..],
        &["verify", "--suite", "constants", "--weights", "1,1", "--qr", "2,0"][..],
        &["verify", "--suite", "nonsense"][..],
        &["verify", "--prime", "7"][..],
    ] {
        let o = gsp4(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stdout(&o).is_empty());
    }
}

#[test]
fn decompose_fills_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let o = gsp4(dir.path(), &["decompose", "--element", "diag(p,p,1,1)", "--level", "sieg", "--prime", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("8 cosets"), "{out}");
    assert_eq!(out.lines().count(), 9);
    let again = gsp4(dir.path(), &["decompose", "--element", "diag(p,p,1,1)", "--level", "sieg", "--prime", "2"]);
    assert_eq!(stdout(&again), out);
    assert_eq!(stdout(&gsp4(dir.path(), &["cache"])).lines().count(), 1);
    assert!(stdout(&gsp4(dir.path(), &["cache", "--clear"])).starts_with("removed 1"));
    assert_eq!(stdout(&gsp4(dir.path(), &["cache"])).lines().count(), 0);
}
