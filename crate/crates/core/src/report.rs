//! JSON, CSV and Markdown renderings of snapshots and diffs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::rules::Severity;
use crate::snapshot::{AuditSnapshot, DiffReport};
use crate::taxonomy::Issue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown format {other:?} (expected json, csv or markdown)")),
        }
    }
}

/// Column order of the audit template.
pub const CSV_HEADER: [&str; 12] = [
    "fingerprint",
    "rule",
    "severity",
    "platform",
    "course_element",
    "format",
    "reference",
    "context_purpose",
    "issue_description",
    "instructional_necessity",
    "fix_suggestion",
    "trivial_fix",
];

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory CSV writer")
}

fn issue_row(issue: &Issue) -> [String; 12] {
    [
        issue.fingerprint.clone(),
        issue.finding.rule_id.clone(),
        issue.finding.severity.to_string(),
        issue.platform.clone(),
        issue.course_element.clone(),
        issue.format.as_str().to_string(),
        issue.reference.clone(),
        issue.context_purpose.clone().unwrap_or_default(),
        issue.finding.message.clone(),
        issue.instructional_necessity.map(|n| n.as_str().to_string()).unwrap_or_default(),
        issue.fix_suggestion.clone(),
        issue.trivial_fix.map(|b| b.to_string()).unwrap_or_default(),
    ]
}

pub fn render_json(snapshot: &AuditSnapshot) -> Vec<u8> {
    snapshot.to_json()
}

/// RFC 4180 CSV, one row per issue in snapshot order.
pub fn render_csv(snapshot: &AuditSnapshot) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(CSV_HEADER).expect("write to Vec");
    for issue in &snapshot.issues {
        w.write_record(issue_row(issue)).expect("write to Vec");
    }
    finish(w)
}

pub fn render(snapshot: &AuditSnapshot, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => render_json(snapshot),
        ReportFormat::Csv => render_csv(snapshot),
        ReportFormat::Markdown => render_summary(snapshot, ReportFormat::Markdown),
    }
}

/// Table-1 style totals for one snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub unique_resources: usize,
    pub issues_identified: usize,
    pub by_severity: BTreeMap<String, usize>,
    pub by_rule: BTreeMap<String, usize>,
    pub by_platform: BTreeMap<String, usize>,
}

const SEVERITIES: [Severity; 3] = [Severity::Error, Severity::Warning, Severity::NeedsHumanReview];

impl Summary {
    pub fn of(snapshot: &AuditSnapshot) -> Self {
        let mut by_severity: BTreeMap<String, usize> =
            SEVERITIES.iter().map(|s| (s.to_string(), 0)).collect();
        let mut by_rule = BTreeMap::new();
        let mut by_platform = BTreeMap::new();
        for i in &snapshot.issues {
            *by_severity.entry(i.severity().to_string()).or_default() += 1;
            *by_rule.entry(i.rule_id().to_string()).or_default() += 1;
            *by_platform.entry(i.platform.clone()).or_default() += 1;
        }
        Summary {
            unique_resources: snapshot.resources.len(),
            issues_identified: snapshot.issues.len(),
            by_severity,
            by_rule,
            by_platform,
        }
    }

    /// (section, key, count) rows in display order.
    fn rows(&self) -> Vec<(&'static str, String, usize)> {
        let mut rows = vec![
            ("total", "Unique resources".to_string(), self.unique_resources),
            ("total", "Issues identified".to_string(), self.issues_identified),
        ];
        for s in SEVERITIES {
            rows.push(("severity", s.to_string(), self.by_severity[s.as_str()]));
        }
        rows.extend(self.by_rule.iter().map(|(k, v)| ("rule", k.clone(), *v)));
        rows.extend(self.by_platform.iter().map(|(k, v)| ("platform", k.clone(), *v)));
        rows
    }
}

const SECTIONS: [(&str, &str); 3] = [("severity", "Severity"), ("rule", "Rule"), ("platform", "Platform")];

pub fn render_summary(snapshot: &AuditSnapshot, format: ReportFormat) -> Vec<u8> {
    let summary = Summary::of(snapshot);
    match format {
        ReportFormat::Json => crate::canonical::to_vec(&summary),
        ReportFormat::Csv => {
            let mut w = csv_writer();
            w.write_record(["section", "key", "count"]).expect("write to Vec");
            for (section, key, n) in summary.rows() {
                w.write_record([section, &key, &n.to_string()]).expect("write to Vec");
            }
            finish(w)
        }
        ReportFormat::Markdown => {
            let rows = summary.rows();
            let mut out = String::new();
            let _ = writeln!(out, "## Audit summary\n");
            let _ = writeln!(out, "Unique resources: {}  ", summary.unique_resources);
            let _ = writeln!(out, "Issues identified: {}\n", summary.issues_identified);
            let _ = writeln!(out, "| | Count |\n| --- | ---: |");
            for (_, key, n) in rows.iter().filter(|r| r.0 == "total") {
                let _ = writeln!(out, "| {key} | {n} |");
            }
            for (section, title) in SECTIONS {
                let part: Vec<_> = rows.iter().filter(|r| r.0 == section).collect();
                if part.is_empty() {
                    continue;
                }
                let _ = writeln!(out, "\n| {title} | Count |\n| --- | ---: |");
                for (_, key, n) in part {
                    let _ = writeln!(out, "| {} | {n} |", md_escape(key));
                }
            }
            out.into_bytes()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummaryPair {
    pub old: Summary,
    pub new: Summary,
}

fn signed(old: usize, new: usize) -> String {
    match new.cmp(&old) {
        std::cmp::Ordering::Greater => format!("+{}", new - old),
        std::cmp::Ordering::Less => format!("-{}", old - new),
        std::cmp::Ordering::Equal => "0".to_string(),
    }
}

/// Rows of both summaries aligned on (section, key); missing keys count 0.
fn pair_rows(old: &Summary, new: &Summary) -> Vec<(&'static str, String, usize, usize)> {
    let (old_rows, new_rows) = (old.rows(), new.rows());
    let mut keys: Vec<(&'static str, String)> = Vec::new();
    for (s, k, _) in old_rows.iter().chain(&new_rows) {
        if !keys.iter().any(|(ks, kk)| ks == s && kk == k) {
            keys.push((s, k.clone()));
        }
    }
    let order = |s: &str| ["total", "severity", "rule", "platform"].iter().position(|x| *x == s);
    // Stable sort: totals and severities keep their fixed order.
    keys.sort_by_key(|(s, k)| {
        let named = matches!(*s, "rule" | "platform");
        (order(s), if named { k.clone() } else { String::new() })
    });
    let get = |rows: &[(&str, String, usize)], s: &str, k: &str| {
        rows.iter().find(|r| r.0 == s && r.1 == k).map_or(0, |r| r.2)
    };
    keys.into_iter()
        .map(|(s, k)| {
            let (o, n) = (get(&old_rows, s, &k), get(&new_rows, s, &k));
            (s, k, o, n)
        })
        .collect()
}

pub fn render_summary_pair(old: &AuditSnapshot, new: &AuditSnapshot, format: ReportFormat) -> Vec<u8> {
    let (o, n) = (Summary::of(old), Summary::of(new));
    match format {
        ReportFormat::Json => crate::canonical::to_vec(&SummaryPair { old: o, new: n }),
        ReportFormat::Csv => {
            let mut w = csv_writer();
            w.write_record(["section", "key", "old", "new", "delta"]).expect("write to Vec");
            for (section, key, a, b) in pair_rows(&o, &n) {
                w.write_record([section, &key, &a.to_string(), &b.to_string(), &signed(a, b)])
                    .expect("write to Vec");
            }
            finish(w)
        }
        ReportFormat::Markdown => {
            let rows = pair_rows(&o, &n);
            let mut out = String::new();
            let _ = writeln!(out, "## Audit summary\n");
            let _ = writeln!(
                out,
                "Unique resources: {} → {} ({})  ",
                o.unique_resources,
                n.unique_resources,
                signed(o.unique_resources, n.unique_resources)
            );
            let _ = writeln!(
                out,
                "Issues identified: {} → {} ({})\n",
                o.issues_identified,
                n.issues_identified,
                signed(o.issues_identified, n.issues_identified)
            );
            let _ = writeln!(out, "| | Old | New | Delta |\n| --- | ---: | ---: | ---: |");
            for (_, key, a, b) in rows.iter().filter(|r| r.0 == "total") {
                let _ = writeln!(out, "| {key} | {a} | {b} | {} |", signed(*a, *b));
            }
            for (section, title) in SECTIONS {
                let part: Vec<_> = rows.iter().filter(|r| r.0 == section).collect();
                if part.is_empty() {
                    continue;
                }
                let _ = writeln!(out, "\n| {title} | Old | New | Delta |\n| --- | ---: | ---: | ---: |");
                for (_, key, a, b) in part {
                    let _ = writeln!(out, "| {} | {a} | {b} | {} |", md_escape(key), signed(*a, *b));
                }
            }
            out.into_bytes()
        }
    }
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

pub fn render_diff(report: &DiffReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => {
            let mut w = csv_writer();
            let mut header = vec!["change"];
            header.extend(CSV_HEADER);
            w.write_record(&header).expect("write to Vec");
            let groups = [
                ("new", &report.new_issues),
                ("resolved", &report.resolved_issues),
                ("persisting", &report.persisting_issues),
            ];
            for (change, issues) in groups {
                for issue in issues {
                    let mut row = vec![change.to_string()];
                    row.extend(issue_row(issue));
                    w.write_record(&row).expect("write to Vec");
                }
            }
            finish(w)
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "{}\n", report.headline());
            let _ = writeln!(out, "Old: `{}`  \nNew: `{}`", report.old_ref, report.new_ref);
            if let Some(skew) = &report.version_skew {
                let _ = writeln!(out, "\nVersion skew: {} → {}", skew.old, skew.new);
            }
            if !report.per_rule_delta.is_empty() {
                let _ = writeln!(out, "\n| Rule | Old | New | Delta |\n| --- | ---: | ---: | ---: |");
                for (rule, d) in &report.per_rule_delta {
                    let _ = writeln!(out, "| {rule} | {} | {} | {} |", d.old_count, d.new_count, signed(d.old_count, d.new_count));
                }
            }
            for (title, issues) in [("New", &report.new_issues), ("Resolved", &report.resolved_issues)] {
                if issues.is_empty() {
                    continue;
                }
                let _ = writeln!(out, "\n### {title}\n");
                for i in issues {
                    let _ = writeln!(
                        out,
                        "- `{}` {} ({}) {}: {}",
                        i.fingerprint,
                        i.rule_id(),
                        i.severity(),
                        i.reference,
                        i.finding.message
                    );
                }
            }
            out.into_bytes()
        }
    }
}
