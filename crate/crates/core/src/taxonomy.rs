//! Issues: findings with a stable fingerprint and the audit-template
//! classification columns, plus the human annotation overlay.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use globset::{Glob, GlobMatcher};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Config, GlobLabel};
use crate::error::{Error, Result};
use crate::rules::{Finding, Severity};

pub const UNCLASSIFIED: &str = "unclassified";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Video,
    Text,
    Image,
    AnimatedGif,
    Drawing,
    ShapesObjects,
    Code,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Video => "video",
            Format::Text => "text",
            Format::Image => "image",
            Format::AnimatedGif => "animated-gif",
            Format::Drawing => "drawing",
            Format::ShapesObjects => "shapes-objects",
            Format::Code => "code",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Necessity {
    Required,
    NotNecessary,
}

impl Necessity {
    pub fn as_str(self) -> &'static str {
        match self {
            Necessity::Required => "required",
            Necessity::NotNecessary => "not-necessary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    #[default]
    Open,
    Wontfix,
    FalsePositive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Open => "open",
            Status::Wontfix => "wontfix",
            Status::FalsePositive => "false-positive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub fingerprint: String,
    #[serde(flatten)]
    pub finding: Finding,
    pub platform: String,
    pub course_element: String,
    pub format: Format,
    pub reference: String,
    pub context_purpose: Option<String>,
    pub instructional_necessity: Option<Necessity>,
    pub fix_suggestion: String,
    pub trivial_fix: Option<bool>,
    #[serde(default)]
    pub status: Status,
}

impl Issue {
    pub fn severity(&self) -> Severity {
        self.finding.severity
    }

    pub fn rule_id(&self) -> &str {
        &self.finding.rule_id
    }
}

fn fingerprint_input(finding: &Finding) -> Vec<u8> {
    let mut input = Vec::new();
    for part in [&finding.rule_id, &finding.file_path, &finding.anchor] {
        input.extend_from_slice(part.as_bytes());
        input.push(0);
    }
    input
}

fn short_digest(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..16])
}

/// Digest of rule, file and the offending content. Position (structural
/// path, line) is deliberately excluded so moving a node keeps its identity.
pub fn fingerprint(finding: &Finding) -> String {
    short_digest(&fingerprint_input(finding))
}

/// Fingerprints for a sorted finding list. The k-th repeat (k ≥ 1) of the
/// same (rule, file, content) gets the ordinal mixed in.
pub fn assign_fingerprints(findings: &[Finding]) -> Vec<String> {
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    findings
        .iter()
        .map(|f| {
            let mut input = fingerprint_input(f);
            let k = seen.entry(input.clone()).or_insert(0);
            let ordinal = *k;
            *k += 1;
            if ordinal > 0 {
                input.extend_from_slice(format!("#{ordinal}").as_bytes());
            }
            short_digest(&input)
        })
        .collect()
}

fn is_gif(src: &str) -> bool {
    let end = src.find(['?', '#']).unwrap_or(src.len());
    src[..end].to_ascii_lowercase().ends_with(".gif")
}

pub fn format_of(finding: &Finding) -> Format {
    match finding.element.as_str() {
        "img" if finding.src.as_deref().is_some_and(is_gif) => Format::AnimatedGif,
        "img" | "image" => Format::Image,
        "video" => Format::Video,
        "pre" | "code" => Format::Code,
        "shape" | "group" => Format::ShapesObjects,
        _ => Format::Text,
    }
}

fn slide_number(locator: &str) -> Option<&str> {
    let rest = locator.strip_prefix("slide[")?;
    Some(&rest[..rest.find(']')?])
}

/// `lecture07` → `lecture 7`.
fn deck_label(path: &str) -> Option<String> {
    let name = path.rsplit('/').next()?;
    let stem = name.strip_suffix(".slides.json").unwrap_or(name);
    let digits_at = stem.find(|c: char| c.is_ascii_digit())?;
    let (word, number) = stem.split_at(digits_at);
    let word = word.trim_end_matches(['-', '_', ' ']);
    if word.is_empty() || !word.chars().all(|c| c.is_ascii_alphabetic()) || !number.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let number = number.trim_start_matches('0');
    let number = if number.is_empty() { "0" } else { number };
    Some(format!("{} {number}", word.to_ascii_lowercase()))
}

pub fn reference_of(finding: &Finding) -> String {
    match slide_number(&finding.locator) {
        Some(n) => match deck_label(&finding.file_path) {
            Some(label) => format!("{label}, slide {n}"),
            None => format!("{}, slide {n}", finding.file_path),
        },
        None => format!("{}, {}", finding.file_path, finding.locator),
    }
}

/// Compiled glob → label maps; first match wins.
pub struct Classifier {
    platform: Vec<(GlobMatcher, String)>,
    course_element: Vec<(GlobMatcher, String)>,
}

fn compile(map: &[GlobLabel]) -> Result<Vec<(GlobMatcher, String)>> {
    map.iter()
        .map(|m| {
            let glob = Glob::new(&m.glob).map_err(|e| Error::Config(format!("bad glob {:?}: {e}", m.glob)))?;
            Ok((glob.compile_matcher(), m.label.clone()))
        })
        .collect()
}

fn first_label(map: &[(GlobMatcher, String)], path: &str) -> String {
    map.iter()
        .find(|(g, _)| g.is_match(path))
        .map_or_else(|| UNCLASSIFIED.to_string(), |(_, l)| l.clone())
}

impl Classifier {
    pub fn new(config: &Config) -> Result<Self> {
        Ok(Classifier {
            platform: compile(&config.platform_map)?,
            course_element: compile(&config.course_element_map)?,
        })
    }

    pub fn classify(&self, finding: Finding, fingerprint: String) -> Issue {
        Issue {
            fingerprint,
            platform: first_label(&self.platform, &finding.file_path),
            course_element: first_label(&self.course_element, &finding.file_path),
            format: format_of(&finding),
            reference: reference_of(&finding),
            context_purpose: None,
            instructional_necessity: None,
            fix_suggestion: finding.fix_hint.clone(),
            trivial_fix: None,
            status: Status::Open,
            finding,
        }
    }
}

/// Fingerprint and classify a sorted finding list.
pub fn build_issues(findings: Vec<Finding>, config: &Config) -> Result<Vec<Issue>> {
    let classifier = Classifier::new(config)?;
    let fingerprints = assign_fingerprints(&findings);
    Ok(findings
        .into_iter()
        .zip(fingerprints)
        .map(|(f, fp)| classifier.classify(f, fp))
        .collect())
}

/// Human judgement for one issue. `null` or a missing key leaves the
/// issue's value alone.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotation {
    #[serde(default)]
    pub context_purpose: Option<String>,
    #[serde(default)]
    pub instructional_necessity: Option<Necessity>,
    #[serde(default)]
    pub fix_suggestion: Option<String>,
    #[serde(default)]
    pub trivial_fix: Option<bool>,
    #[serde(default)]
    pub status: Option<Status>,
    /// Only `drawing`, which no rule can detect.
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnnotationOverlay(pub BTreeMap<String, Annotation>);

impl AnnotationOverlay {
    pub fn from_json(label: &str, bytes: &[u8]) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let overlay: AnnotationOverlay = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::malformed("annotation overlay", label, e))?;
        for (fp, a) in &overlay.0 {
            if a.format.is_some_and(|f| f != Format::Drawing) {
                return Err(Error::malformed(
                    "annotation overlay",
                    label,
                    format!("{fp}.format: only \"drawing\" can be set by annotation"),
                ));
            }
        }
        Ok(overlay)
    }

    /// Skeleton with an empty entry for every issue that needs review.
    pub fn skeleton(issues: &[Issue]) -> Self {
        AnnotationOverlay(
            issues
                .iter()
                .filter(|i| i.severity() == Severity::NeedsHumanReview)
                .map(|i| (i.fingerprint.clone(), Annotation::default()))
                .collect(),
        )
    }
}

/// Merge overlay entries into matching issues. Returns one warning per
/// overlay fingerprint that matches no issue.
pub fn apply_annotations(mut issues: Vec<Issue>, overlay: &AnnotationOverlay) -> (Vec<Issue>, Vec<String>) {
    let mut used = vec![false; overlay.0.len()];
    let keys: Vec<&String> = overlay.0.keys().collect();
    for issue in &mut issues {
        let Ok(i) = keys.binary_search(&&issue.fingerprint) else { continue };
        used[i] = true;
        let a = &overlay.0[keys[i]];
        if let Some(v) = &a.context_purpose {
            issue.context_purpose = Some(v.clone());
        }
        if let Some(v) = a.instructional_necessity {
            issue.instructional_necessity = Some(v);
        }
        if let Some(v) = &a.fix_suggestion {
            issue.fix_suggestion = v.clone();
        }
        if let Some(v) = a.trivial_fix {
            issue.trivial_fix = Some(v);
        }
        if let Some(v) = a.status {
            issue.status = v;
        }
        if let Some(v) = a.format {
            issue.format = v;
        }
    }
    let warnings = keys
        .iter()
        .zip(used)
        .filter(|(_, u)| !u)
        .map(|(fp, _)| format!("annotation for {fp} matches no issue"))
        .collect();
    (issues, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn finding(rule: &str, file: &str, locator: &str, element: &str, anchor: &str) -> Finding {
        Finding {
            rule_id: rule.into(),
            severity: Severity::Error,
            file_path: file.into(),
            locator: locator.into(),
            source_line: Some(3),
            snippet: "<x>".into(),
            message: "m".into(),
            fix_hint: "hint".into(),
            machine_decidable: true,
            element: element.into(),
            src: None,
            anchor: anchor.into(),
        }
    }

    #[test]
    fn fingerprint_ignores_position() {
        let a = finding("alt-missing", "a.html", "/html/body/p[3]/img[1]", "img", "k");
        let mut b = a.clone();
        b.locator = "/html/body/p[5]/img[1]".into();
        b.source_line = Some(40);
        assert_eq!(fingerprint(&a), fingerprint(&b));
        b.anchor = "k2".into();
        assert_ne!(fingerprint(&a), fingerprint(&b));
        assert_eq!(fingerprint(&a).len(), 32);
    }

    #[test]
    fn collisions_get_ordinals() {
        let a = finding("alt-missing", "a.html", "/p[1]", "img", "k");
        let b = finding("alt-missing", "a.html", "/p[2]", "img", "k");
        let fps = assign_fingerprints(&[a.clone(), b]);
        assert_eq!(fps[0], fingerprint(&a));
        assert_ne!(fps[0], fps[1]);
        assert_eq!(fps, assign_fingerprints(&[a.clone(), a]));
    }

    #[test]
    fn reference_forms() {
        let f = finding("slide-offcanvas", "slides/lecture07.slides.json", "slide[18]/element[t]", "text", "k");
        assert_eq!(reference_of(&f), "lecture 7, slide 18");
        let f = finding("slide-offcanvas", "decks/intro.slides.json", "slide[2]", "slide", "k");
        assert_eq!(reference_of(&f), "decks/intro.slides.json, slide 2");
        let f = finding("alt-missing", "specs/hw3.html", "/html/body/main[1]/img[2]", "img", "k");
        assert_eq!(reference_of(&f), "specs/hw3.html, /html/body/main[1]/img[2]");
        assert_eq!(deck_label("section-12.slides.json").as_deref(), Some("section 12"));
    }

    #[test]
    fn formats() {
        let mut f = finding("alt-missing", "a.html", "/", "img", "k");
        assert_eq!(format_of(&f), Format::Image);
        f.src = Some("anim/Spin.GIF?v=2".into());
        assert_eq!(format_of(&f), Format::AnimatedGif);
        f.element = "pre".into();
        assert_eq!(format_of(&f), Format::Code);
        f.element = "group".into();
        assert_eq!(format_of(&f), Format::ShapesObjects);
        f.element = "p".into();
        assert_eq!(format_of(&f), Format::Text);
    }

    #[test]
    fn platform_mapping() {
        let config = Config::from_json(
            "c",
            br#"{"platform_map": [{"glob": "ed/**", "label": "ed"}, {"glob": "**", "label": "website"}],
                 "course_element_map": [{"glob": "**/readings/**", "label": "reading"}]}"#,
        )
        .unwrap();
        let c = Classifier::new(&config).unwrap();
        let i = c.classify(finding("alt-missing", "ed/readings/r3.html", "/", "img", "k"), "fp".into());
        assert_eq!((i.platform.as_str(), i.course_element.as_str()), ("ed", "reading"));
        let i = c.classify(finding("alt-missing", "other.md", "/", "img", "k"), "fp".into());
        assert_eq!((i.platform.as_str(), i.course_element.as_str()), ("website", UNCLASSIFIED));
        let bare = Classifier::new(&Config::default()).unwrap();
        assert_eq!(bare.classify(finding("x", "a", "/", "p", "k"), "fp".into()).platform, UNCLASSIFIED);
    }

    #[test]
    fn overlay_merge_and_stale() {
        let issues = build_issues(vec![finding("alt-missing", "a.html", "/", "img", "k")], &Config::default()).unwrap();
        let fp = issues[0].fingerprint.clone();
        let json = format!(r#"{{"{fp}": {{"trivial_fix": true, "status": null}}, "deadbeef": {{}}}}"#);
        let overlay = AnnotationOverlay::from_json("o", json.as_bytes()).unwrap();
        let (out, warnings) = apply_annotations(issues.clone(), &overlay);
        assert_eq!(out[0].trivial_fix, Some(true));
        assert_eq!(out[0].status, Status::Open);
        assert_eq!(warnings, ["annotation for deadbeef matches no issue"]);
        let (twice, _) = apply_annotations(out.clone(), &overlay);
        assert_eq!(twice, out);
        let (same, w) = apply_annotations(issues.clone(), &AnnotationOverlay::default());
        assert_eq!((same, w.len()), (issues, 0));
    }

    #[test]
    fn overlay_rejects_machine_fields() {
        assert!(AnnotationOverlay::from_json("o", br#"{"f": {"severity": "error"}}"#).is_err());
        assert!(AnnotationOverlay::from_json("o", br#"{"f": {"format": "image"}}"#).is_err());
        assert!(AnnotationOverlay::from_json("o", br#"{"f": {"format": "drawing"}}"#).is_ok());
        assert!(AnnotationOverlay::from_json("o", b"[1]").is_err());
    }

    #[test]
    fn issue_json_round_trip() {
        let issues = build_issues(vec![finding("alt-missing", "a.html", "/", "img", "k")], &Config::default()).unwrap();
        let json = serde_json::to_string(&issues[0]).unwrap();
        let back: Issue = serde_json::from_str(&json).unwrap();
        assert_eq!(back, issues[0]);
    }
}
