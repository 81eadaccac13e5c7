use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn signsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_signsym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sym_det_prints_the_two_cycle_polynomial() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "w.pm", "3\n1 -1 ?\n-1 1 ?\n? ? 1\n");
    let o = signsym(&["sym-det", arg(&f)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-x13*x31 - x13*x32 - x23*x31 - x23*x32");
}

#[test]
fn enumerate_prints_buckets() {
    let o = signsym(&["enumerate", "--order", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("order 3: 16 classes, buckets [1, 1, 4, 4, 4, 1, 1]"));
    assert!(out.lines().any(|l| l == "q=2: 4 classes"));
    assert_eq!(out.lines().filter(|l| l.starts_with("  ")).count(), 16);
}

#[test]
fn check_class_reports_membership() {
    let dir = TempDir::new().unwrap();
    let id = write(dir.path(), "id.mat", "3\n1 0 0\n0 1 0\n0 0 1\n");
    let o = signsym(&["check-class", arg(&id), "--class", "ssp01plus"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "member");
    let bad = write(dir.path(), "bad.mat", "2\n1 2\n-1 1\n");
    let o = signsym(&["check-class", arg(&bad)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("non-member"));
}

#[test]
fn check_partial_reports_case() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "p.pm", "2\n1 ?\n? 1\n");
    let o = signsym(&["check-partial", arg(&f)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("member"));
}

#[test]
fn complete_prints_a_reparseable_matrix() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "w.pm", "3\n1 -1 ?\n-1 1 ?\n? ? 1\n");
    let o = signsym(&["complete", arg(&f), "--seed", "3", "--budget", "5000"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("found by search"), "{out}");
    let matrix: String = out.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let m = write(dir.path(), "m.mat", &matrix);
    assert_eq!(stdout(&signsym(&["check-class", arg(&m)])).trim(), "member");
    assert_eq!(o.stdout, signsym(&["complete", arg(&f), "--seed", "3", "--budget", "5000"]).stdout);
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "bad.pm", "2\n1 x\n? 1\n");
    let o = signsym(&["sym-det", arg(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = signsym(&["audit", "--format", "xml", "--orders", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precondition_failures_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "neg.pm", "2\n-1 ?\n? 1\n");
    assert_eq!(signsym(&["complete", arg(&f)]).status.code(), Some(3));
    assert_eq!(signsym(&["enumerate", "--order", "5"]).status.code(), Some(3));
}

#[test]
fn classify_reports_a_status() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.dg", "2 0 loops=all\n");
    let o = signsym(&["classify", "--pattern", arg(&f)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("yes-proved"), "{}", stdout(&o));
}

#[test]
fn audit_report_verifies_and_detects_tampering() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let o = signsym(&[
        "audit", "--orders", "1..2", "--samples", "5", "--related-samples", "2",
        "--out", arg(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("4 patterns"));
    let o = signsym(&["verify-certificate", arg(&report), "--all"]);
    assert!(o.status.success());
    assert!(stdout(&o).trim_end().ends_with("all valid"));
    let o = signsym(&["verify-certificate", arg(&report), "--row", "1"]);
    assert!(o.status.success());
    assert_eq!(signsym(&["verify-certificate", arg(&report), "--row", "9"]).status.code(), Some(3));

    let text = fs::read_to_string(&report).unwrap();
    let tampered = text.replacen("\"completion\": \"1\\n1\\n\"", "\"completion\": \"1\\n-1\\n\"", 1);
    assert_ne!(tampered, text);
    let bad = write(dir.path(), "bad.json", &tampered);
    let o = signsym(&["verify-certificate", arg(&bad), "--all"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("INVALID"));
}

#[test]
fn audit_text_output_is_stable() {
    let args = ["audit", "--orders", "2", "--samples", "4", "--no-related", "--format", "text"];
    let a = signsym(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, signsym(&args).stdout);
    assert!(stdout(&a).contains("tallies"));
}
