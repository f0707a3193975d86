#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use a11y_audit::AuditSnapshot;

pub const TIMESTAMP: &str = "2026-01-15T09:30:00Z";

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

/// The CLI binary with a fixed timestamp and no colour.
pub fn cli() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_a11y-audit"));
    cmd.env("A11Y_AUDIT_TIMESTAMP", TIMESTAMP).env("NO_COLOR", "1");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    cli().args(args).output().expect("spawn a11y-audit")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn copy_dir(from: &Path, to: &Path) {
    for entry in walkdir::WalkDir::new(from) {
        let entry = entry.unwrap();
        let rel = entry.path().strip_prefix(from).unwrap();
        let dest = to.join(rel);
        if entry.file_type().is_dir() {
            std::fs::create_dir_all(&dest).unwrap();
        } else {
            std::fs::copy(entry.path(), &dest).unwrap();
        }
    }
}

/// Replace exactly one occurrence of `from` in `path`.
pub fn edit(path: &Path, from: &str, to: &str) {
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.matches(from).count(), 1, "{from:?} in {}", path.display());
    std::fs::write(path, text.replacen(from, to, 1)).unwrap();
}

/// Audit `root` through the CLI and return the parsed snapshot.
pub fn audit(root: &Path, out: &Path) -> AuditSnapshot {
    let o = run(&["audit", root.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    AuditSnapshot::from_json("snapshot", &std::fs::read(out).unwrap()).unwrap()
}

/// `(rule_id, file_path, locator)` ground truth for the planted corpus.
pub fn planted_expected() -> Vec<(String, String, String)> {
    let bytes = std::fs::read(fixture("planted-expected.json")).unwrap();
    serde_json::from_slice(&bytes).unwrap()
}
