//! Persisted audit results, pairwise diffs and baselines.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Config, FailOn};
use crate::content::{MediaKind, SourceFile};
use crate::error::{Error, Result};
use crate::rules::finding_order;
use crate::taxonomy::{Issue, Status};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resource {
    pub path: String,
    pub content_hash: String,
    pub media_kind: MediaKind,
}

impl From<&SourceFile> for Resource {
    fn from(f: &SourceFile) -> Self {
        Resource {
            path: f.path.clone(),
            content_hash: f.content_hash.clone(),
            media_kind: f.media_kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSnapshot {
    pub created_at: String,
    pub tool_version: String,
    pub config_hash: String,
    pub resources: Vec<Resource>,
    pub issues: Vec<Issue>,
}

/// Counted in diffs and gates: everything not marked a false positive.
pub fn countable(issue: &Issue) -> bool {
    issue.status != Status::FalsePositive
}

impl AuditSnapshot {
    pub fn new(mut issues: Vec<Issue>, mut resources: Vec<Resource>, config: &Config, created_at: String) -> Self {
        issues.sort_by(|a, b| finding_order(&a.finding, &b.finding).then_with(|| a.fingerprint.cmp(&b.fingerprint)));
        resources.sort_by(|a, b| a.path.cmp(&b.path));
        AuditSnapshot {
            created_at,
            tool_version: TOOL_VERSION.to_string(),
            config_hash: config.hash(),
            resources,
            issues,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        crate::canonical::to_vec(self)
    }

    pub fn from_json(label: &str, bytes: &[u8]) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        serde_path_to_error::deserialize(de).map_err(|e| Error::malformed("snapshot", label, e))
    }

    /// Short content digest of the canonical serialization.
    pub fn id(&self) -> String {
        hex::encode(&Sha256::digest(self.to_json())[..8])
    }

    pub fn countable_issues(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| countable(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RuleDelta {
    pub old_count: usize,
    pub new_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionSkew {
    pub old: String,
    pub new: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffReport {
    pub old_ref: String,
    pub new_ref: String,
    pub new_issues: Vec<Issue>,
    pub resolved_issues: Vec<Issue>,
    /// The newer snapshot's copy of each persisting issue.
    pub persisting_issues: Vec<Issue>,
    pub per_rule_delta: BTreeMap<String, RuleDelta>,
    pub version_skew: Option<VersionSkew>,
}

impl DiffReport {
    pub fn to_json(&self) -> Vec<u8> {
        crate::canonical::to_vec(self)
    }

    pub fn from_json(label: &str, bytes: &[u8]) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        serde_path_to_error::deserialize(de).map_err(|e| Error::malformed("diff report", label, e))
    }

    pub fn headline(&self) -> String {
        format!(
            "{} new, {} resolved, {} persisting",
            self.new_issues.len(),
            self.resolved_issues.len(),
            self.persisting_issues.len()
        )
    }
}

/// Set difference over fingerprints; false positives are left out of all
/// three sets and of the per-rule counts.
pub fn diff(old: &AuditSnapshot, new: &AuditSnapshot) -> DiffReport {
    let old_fps: HashSet<&str> = old.countable_issues().map(|i| i.fingerprint.as_str()).collect();
    let new_fps: HashSet<&str> = new.countable_issues().map(|i| i.fingerprint.as_str()).collect();
    let new_issues = new
        .countable_issues()
        .filter(|i| !old_fps.contains(i.fingerprint.as_str()))
        .cloned()
        .collect();
    let persisting_issues = new
        .countable_issues()
        .filter(|i| old_fps.contains(i.fingerprint.as_str()))
        .cloned()
        .collect();
    let resolved_issues = old
        .countable_issues()
        .filter(|i| !new_fps.contains(i.fingerprint.as_str()))
        .cloned()
        .collect();
    let mut per_rule_delta: BTreeMap<String, RuleDelta> = BTreeMap::new();
    for i in old.countable_issues() {
        per_rule_delta.entry(i.rule_id().to_string()).or_default().old_count += 1;
    }
    for i in new.countable_issues() {
        per_rule_delta.entry(i.rule_id().to_string()).or_default().new_count += 1;
    }
    let version_skew = (old.tool_version != new.tool_version).then(|| VersionSkew {
        old: old.tool_version.clone(),
        new: new.tool_version.clone(),
    });
    DiffReport {
        old_ref: old.id(),
        new_ref: new.id(),
        new_issues,
        resolved_issues,
        persisting_issues,
        per_rule_delta,
        version_skew,
    }
}

/// Known fingerprints that do not fail the gate.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Baseline(pub BTreeSet<String>);

impl Baseline {
    pub fn from_json(label: &str, bytes: &[u8]) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        serde_path_to_error::deserialize(de).map_err(|e| Error::malformed("baseline", label, e))
    }

    /// Every fingerprint in the snapshot.
    pub fn from_snapshot(snapshot: &AuditSnapshot) -> Self {
        Baseline(snapshot.issues.iter().map(|i| i.fingerprint.clone()).collect())
    }

    pub fn to_json(&self) -> Vec<u8> {
        crate::canonical::to_vec(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GatedIssue<'a> {
    pub issue: &'a Issue,
    pub suppressed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gated<'a> {
    pub issues: Vec<GatedIssue<'a>>,
    /// Baseline fingerprints no longer present; safe to drop from the baseline.
    pub ratchet_progress: Vec<String>,
}

impl Gated<'_> {
    /// Open, unsuppressed issues at or above `fail_on`. Review findings
    /// never count.
    pub fn failing(&self, fail_on: FailOn) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(move |g| !g.suppressed && g.issue.status == Status::Open && fail_on.gates(g.issue.severity()))
            .map(|g| g.issue)
    }

    pub fn gate_count(&self, fail_on: FailOn) -> usize {
        self.failing(fail_on).count()
    }
}

pub fn apply_baseline<'a>(snapshot: &'a AuditSnapshot, baseline: &Baseline) -> Gated<'a> {
    let present: HashSet<&str> = snapshot.issues.iter().map(|i| i.fingerprint.as_str()).collect();
    Gated {
        issues: snapshot
            .issues
            .iter()
            .map(|issue| GatedIssue {
                issue,
                suppressed: baseline.0.contains(&issue.fingerprint),
            })
            .collect(),
        ratchet_progress: baseline
            .0
            .iter()
            .filter(|fp| !present.contains(fp.as_str()))
            .cloned()
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{Finding, Severity};
    use crate::taxonomy::build_issues;

    fn issue_set(anchors: &[&str]) -> Vec<Issue> {
        let findings = anchors
            .iter()
            .enumerate()
            .map(|(n, a)| Finding {
                rule_id: if a.len() % 2 == 0 { "alt-missing" } else { "doc-lang" }.into(),
                severity: Severity::Error,
                file_path: "a.html".into(),
                locator: format!("/p[{n}]"),
                source_line: None,
                snippet: String::new(),
                message: "m".into(),
                fix_hint: "h".into(),
                machine_decidable: true,
                element: "img".into(),
                src: None,
                anchor: a.to_string(),
            })
            .collect();
        build_issues(findings, &Config::default()).unwrap()
    }

    fn snap(anchors: &[&str]) -> AuditSnapshot {
        AuditSnapshot::new(issue_set(anchors), vec![], &Config::default(), "2026-01-01T00:00:00Z".into())
    }

    #[test]
    fn empty_snapshot_golden() {
        let s = AuditSnapshot::new(vec![], vec![], &Config::default(), "2026-01-01T00:00:00Z".into());
        let text = String::from_utf8(s.to_json()).unwrap();
        let expected = format!(
            "{{\n  \"config_hash\": \"{}\",\n  \"created_at\": \"2026-01-01T00:00:00Z\",\n  \"issues\": [],\n  \"resources\": [],\n  \"tool_version\": \"{TOOL_VERSION}\"\n}}\n",
            Config::default().hash()
        );
        assert_eq!(text, expected);
        assert_eq!(AuditSnapshot::from_json("s", text.as_bytes()).unwrap(), s);
    }

    #[test]
    fn diff_counts() {
        let a = snap(&["1", "2", "3", "4", "5"]);
        let b = snap(&["4", "5", "6", "7"]);
        let d = diff(&a, &b);
        assert_eq!((d.new_issues.len(), d.resolved_issues.len(), d.persisting_issues.len()), (2, 3, 2));
        assert_eq!(d.headline(), "2 new, 3 resolved, 2 persisting");
        let same = diff(&a, &a);
        assert!(same.new_issues.is_empty() && same.resolved_issues.is_empty());
        assert_eq!(same.persisting_issues.len(), 5);
        assert_eq!(diff(&b, &a).resolved_issues, d.new_issues);
        let total: usize = d.per_rule_delta.values().map(|r| r.new_count).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn false_positives_excluded() {
        let a = snap(&["1", "2"]);
        let mut b = a.clone();
        b.issues[0].status = Status::FalsePositive;
        let d = diff(&a, &b);
        assert_eq!((d.new_issues.len(), d.resolved_issues.len(), d.persisting_issues.len()), (0, 1, 1));
    }

    #[test]
    fn version_skew_recorded() {
        let a = snap(&["1"]);
        let mut b = a.clone();
        b.tool_version = "9.9.9".into();
        assert_eq!(diff(&a, &b).version_skew.unwrap().new, "9.9.9");
        assert!(diff(&a, &a).version_skew.is_none());
    }

    #[test]
    fn baseline_gate() {
        let s = snap(&["1", "2", "3"]);
        let none = apply_baseline(&s, &Baseline::default());
        assert_eq!(none.gate_count(FailOn::Error), 3);
        let full = apply_baseline(&s, &Baseline::from_snapshot(&s));
        assert_eq!(full.gate_count(FailOn::Error), 0);
        assert!(full.ratchet_progress.is_empty());
        let mut stale = Baseline::default();
        stale.0.insert("gone".into());
        assert_eq!(apply_baseline(&s, &stale).ratchet_progress, ["gone"]);
        assert!(Baseline::from_json("b", b"{}").is_err());
        assert_eq!(Baseline::from_json("b", br#"["x"]"#).unwrap().0.len(), 1);
    }
}
