mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::fixture;

fn gridplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridplan")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn f(name: &str) -> String {
    fixture(name).display().to_string()
}

fn s(p: &Path) -> String {
    p.display().to_string()
}

fn plan_file(dir: &Path, app: &str, grid: &str, planner: &str) -> PathBuf {
    let out = dir.join(format!("{app}-{grid}-{planner}.plan.json"));
    let r = gridplan(&["plan", "--app", &f(app), "--resources", &f(grid), "--planner", planner, "--out", &s(&out)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    out
}

fn deployed(dir: &Path) -> PathBuf {
    let plan = plan_file(dir, "worked-app.json", "three-node.json", "constrained");
    let session = dir.join("session.json");
    let r = gridplan(&[
        "deploy", "--plan", &s(&plan), "--app", &f("worked-app.json"), "--resources", &f("three-node.json"),
        "--session", &s(&session),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    session
}

#[test]
fn validate_exit_codes() {
    let ok = gridplan(&["validate", "--app", &f("worked-app.json"), "--resources", &f("two-site.json")]);
    assert_eq!(code(&ok), 0);
    for bad in ["ghost-app.json", "duplicate-app.json", "contradiction-app.json"] {
        let r = gridplan(&["validate", "--app", &f(bad), "--resources", &f("two-site.json")]);
        assert_eq!(code(&r), 1, "{bad}");
        assert!(!r.stdout.is_empty());
    }
    let missing = gridplan(&["validate", "--app", "/nonexistent/app.json", "--resources", &f("two-site.json")]);
    assert_eq!(code(&missing), 2);
    let wrong_kind = gridplan(&["validate", "--app", &f("worked-app.json"), "--resources", &f("worked-app.json")]);
    assert_eq!(code(&wrong_kind), 2);
}

#[test]
fn plan_exit_codes_and_repeatability() {
    let dir = tempfile::tempdir().unwrap();
    for planner in ["round-robin", "constrained", "exhaustive"] {
        let a = plan_file(dir.path(), "worked-app.json", "two-site.json", planner);
        let first = std::fs::read(&a).unwrap();
        let b = plan_file(dir.path(), "worked-app.json", "two-site.json", planner);
        assert_eq!(std::fs::read(&b).unwrap(), first, "{planner}");
    }
    let out = dir.path().join("none.json");
    let r = gridplan(&[
        "plan", "--app", &f("infeasible-app.json"), "--resources", &f("two-site.json"), "--planner", "exhaustive",
        "--out", &s(&out),
    ]);
    assert_eq!(code(&r), 1);
    assert!(!out.exists());
    let r = gridplan(&[
        "plan", "--app", &f("trap-app.json"), "--resources", &f("trap-grid.json"), "--planner", "constrained",
        "--out", &s(&out),
    ]);
    assert_eq!(code(&r), 1);
    assert!(String::from_utf8_lossy(&r.stderr).contains("incomplete"));
    let r = gridplan(&[
        "plan", "--app", &f("minimal-app.json"), "--resources", "/nonexistent.json", "--planner", "exhaustive",
        "--out", &s(&out),
    ]);
    assert_eq!(code(&r), 2);
    let r = gridplan(&[
        "plan", "--app", &f("minimal-app.json"), "--resources", &f("two-site.json"), "--planner", "exhaustive",
        "--out", "/nonexistent/dir/plan.json",
    ]);
    assert_eq!(code(&r), 2);
}

#[test]
fn paths_exit_codes() {
    let r = gridplan(&["paths", "--resources", &f("two-site.json"), "--from", "n1", "--to", "n3"]);
    assert_eq!(code(&r), 0);
    assert!(String::from_utf8_lossy(&r.stdout).contains("10.2"));
    let r = gridplan(&["paths", "--resources", &f("two-site.json"), "--from", "n1", "--to", "n99"]);
    assert_eq!(code(&r), 2);
}

#[test]
fn deploy_status_and_control() {
    let dir = tempfile::tempdir().unwrap();
    let session = deployed(dir.path());
    let status = gridplan(&["status", "--session", &s(&session)]);
    assert_eq!(code(&status), 0);
    let text = String::from_utf8(status.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.contains("state=Running")), "{text}");

    let r = gridplan(&["control", "--session", &s(&session), "--server", "mesher", "--action", "suspend"]);
    assert_eq!(code(&r), 0);
    let text = String::from_utf8(gridplan(&["status", "--session", &s(&session)]).stdout).unwrap();
    assert!(text.contains("server=mesher state=Suspended"), "{text}");

    let before = std::fs::read(&session).unwrap();
    let r = gridplan(&["control", "--session", &s(&session), "--server", "coupler", "--action", "resume"]);
    assert_eq!(code(&r), 1);
    assert_eq!(std::fs::read(&session).unwrap(), before);
    let r = gridplan(&["control", "--session", &s(&session), "--server", "ghost", "--action", "cancel"]);
    assert_eq!(code(&r), 1);

    let missing = dir.path().join("missing.json");
    assert_eq!(code(&gridplan(&["status", "--session", &s(&missing)])), 2);
    let r = gridplan(&["control", "--session", &s(&missing), "--server", "mesher", "--action", "cancel"]);
    assert_eq!(code(&r), 2);
}

#[test]
fn deploy_failures() {
    let dir = tempfile::tempdir().unwrap();
    let plan = plan_file(dir.path(), "worked-app.json", "three-node.json", "constrained");
    let session = dir.path().join("s.json");
    let r = gridplan(&[
        "deploy", "--plan", &s(&plan), "--app", &f("worked-app.json"), "--resources", &f("three-node.json"),
        "--session", &s(&session), "--inject-failure", "n1",
    ]);
    assert_eq!(code(&r), 1);
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.contains("server=naming state=Running"), "{text}");
    assert!(text.contains("server=mesher state=Failed job=-"), "{text}");

    let other = dir.path().join("other.json");
    let r = gridplan(&[
        "deploy", "--plan", &s(&plan), "--app", &f("worked-app.json"), "--resources", &f("two-site.json"),
        "--session", &s(&other),
    ]);
    assert_eq!(code(&r), 1);
    assert!(String::from_utf8_lossy(&r.stderr).contains("digest"));
    assert!(!other.exists());

    let r = gridplan(&[
        "deploy", "--plan", &f("worked-app.json"), "--app", &f("worked-app.json"), "--resources", &f("three-node.json"),
        "--session", &s(&other),
    ]);
    assert_eq!(code(&r), 2);
}
