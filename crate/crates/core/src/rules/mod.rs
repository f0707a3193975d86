//! Machine-decidable and heuristic accessibility checks.
//!
//! Each check is a pure function of one parsed [`Document`] or
//! [`SlideDeck`]. [`run_rules`] evaluates all of them (in parallel per file),
//! drops disabled rules, applies severity overrides and sorts the result so
//! that output never depends on scheduling.

pub mod color;
mod contrast;
mod diagrams;
mod headings;
mod images;
mod language;
mod links;
mod media;
pub mod slides;
mod validity;

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Config, Thresholds};
use crate::content::{normalize_whitespace, ContentNode, Document, SlideDeck};

pub use color::{contrast_ratio, relative_luminance};
pub use contrast::check_contrast;
pub use diagrams::check_ascii_diagrams;
pub use headings::check_headings;
pub use images::{check_alt_text, check_images_of_text, check_suspicious_alt};
pub use language::check_visual_language;
pub use links::check_links;
pub use media::check_video_captions;
pub use slides::{check_group_alt, check_offslide_invisible, check_reading_order, geometric_order};
pub use validity::check_document_validity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Error,
    Warning,
    NeedsHumanReview,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::NeedsHumanReview => "needs-human-review",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AppliesTo {
    Document,
    Deck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuleInfo {
    pub id: &'static str,
    pub title: &'static str,
    pub default_severity: Severity,
    pub wcag_ref: Option<&'static str>,
    pub applies_to: AppliesTo,
    /// Every finding of this rule is routed to human review.
    #[serde(skip)]
    pub heuristic_only: bool,
}

const fn rule(
    id: &'static str,
    title: &'static str,
    default_severity: Severity,
    wcag_ref: Option<&'static str>,
    applies_to: AppliesTo,
) -> RuleInfo {
    RuleInfo {
        id,
        title,
        default_severity,
        wcag_ref,
        applies_to,
        heuristic_only: matches!(default_severity, Severity::NeedsHumanReview),
    }
}

use AppliesTo::{Deck, Document as Doc};
use Severity::{Error as Err, NeedsHumanReview as Review, Warning as Warn};

static CATALOG: &[RuleInfo] = &[
    rule("heading-structure", "Headings are present, ordered and non-empty", Err, Some("1.3.1"), Doc),
    rule("link-text", "Link text describes the destination", Err, Some("2.4.4"), Doc),
    rule("alt-missing", "Images have an alt attribute", Err, Some("1.1.1"), Doc),
    rule("alt-length", "Alt text is concise", Warn, Some("1.1.1"), Doc),
    rule("alt-suspicious", "Alt text is not an autogenerated name", Review, Some("1.1.1"), Doc),
    rule("contrast-minimum", "Text meets minimum contrast", Err, Some("1.4.3"), Doc),
    rule("visual-language", "Text does not assume sight", Review, Some("1.3.3"), Doc),
    rule("image-of-text", "Text is not shown as an image", Review, Some("1.4.5"), Doc),
    rule("ascii-diagram", "Figures are not drawn with text characters", Review, Some("1.1.1"), Doc),
    rule("doc-lang", "Page declares its language", Err, Some("3.1.1"), Doc),
    rule("landmark-main", "Page has exactly one main landmark", Err, Some("1.3.1"), Doc),
    rule("duplicate-id", "Element ids are unique", Err, Some("4.1.1"), Doc),
    rule("table-headers", "Data tables have header cells", Err, Some("1.3.1"), Doc),
    rule("html-parse", "Markup parses without repairs", Warn, Some("4.1.1"), Doc),
    rule("video-captions", "Videos have a captions track", Err, Some("1.2.2"), Doc),
    rule("slide-reading-order", "Slide reading order matches the layout", Warn, Some("1.3.2"), Deck),
    rule("slide-offcanvas", "Slide elements are on the slide", Err, Some("1.3.2"), Deck),
    rule("slide-invisible-in-order", "Hidden elements are not in the reading order", Err, Some("1.3.2"), Deck),
    rule("slide-group-alt", "Image/shape groups have alt text", Review, Some("1.1.1"), Deck),
];

/// Every rule the engine can emit, in catalog order.
pub fn catalog() -> &'static [RuleInfo] {
    CATALOG
}

pub fn rule_info(id: &str) -> Option<&'static RuleInfo> {
    CATALOG.iter().find(|r| r.id == id)
}

/// A raw rule hit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub rule_id: String,
    pub severity: Severity,
    pub file_path: String,
    /// Structural path (`/html/body/p[2]`) or slide locator (`slide[3]/element[t1]`).
    pub locator: String,
    pub source_line: Option<u32>,
    /// At most 200 characters of the offending content.
    pub snippet: String,
    pub message: String,
    pub fix_hint: String,
    pub machine_decidable: bool,
    /// Element name, or slide element kind (`slide` for slide-level findings).
    pub element: String,
    pub src: Option<String>,
    /// Digest of the offending content, independent of its position.
    pub anchor: String,
}

pub const SNIPPET_MAX: usize = 200;

pub fn truncate_snippet(s: &str) -> String {
    if s.chars().count() <= SNIPPET_MAX {
        return s.to_string();
    }
    let mut out: String = s.chars().take(SNIPPET_MAX - 1).collect();
    out.push('…');
    out
}

fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    hex::encode(&h.finalize()[..16])
}

/// Digest of element name, attributes (sorted by name) and, for
/// [`AnchorScope::Content`], normalized descendant text.
pub fn node_anchor(node: &ContentNode, scope: AnchorScope) -> String {
    let mut attrs: Vec<String> = node
        .attributes
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    attrs.sort();
    let text = match scope {
        AnchorScope::Content => node.normalized_text(),
        AnchorScope::Tag => String::new(),
    };
    digest(&[&node.element, &attrs.join("\u{1f}"), &text])
}

pub fn text_anchor(parts: &[&str]) -> String {
    digest(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorScope {
    /// Tag plus text: editing the text changes identity.
    Content,
    /// Tag only, for page-level findings on containers (`html`, `body`).
    Tag,
}

pub(crate) fn node_snippet(node: &ContentNode) -> String {
    let text = node.normalized_text();
    let tag = node.open_tag();
    if text.is_empty() || matches!(node.element.as_str(), "html" | "body" | "#root") {
        truncate_snippet(&tag)
    } else {
        truncate_snippet(&format!("{tag}{text}"))
    }
}

/// Locator shown for a node; the root's empty path is shown as `/`.
pub(crate) fn node_locator(node: &ContentNode) -> String {
    if node.structural_path.is_empty() {
        "/".to_string()
    } else {
        node.structural_path.clone()
    }
}

pub(crate) struct Hit<'a> {
    pub rule_id: &'static str,
    pub severity: Severity,
    pub node: &'a ContentNode,
    pub scope: AnchorScope,
    pub message: String,
    pub fix_hint: String,
}

impl Hit<'_> {
    pub(crate) fn into_finding(self, doc: &Document) -> Finding {
        Finding {
            rule_id: self.rule_id.to_string(),
            severity: self.severity,
            file_path: doc.file.path.clone(),
            locator: node_locator(self.node),
            source_line: self.node.source_line,
            snippet: node_snippet(self.node),
            message: self.message,
            fix_hint: self.fix_hint,
            machine_decidable: self.severity != Severity::NeedsHumanReview,
            element: self.node.element.clone(),
            src: self.node.attr("src").map(str::to_string),
            anchor: node_anchor(self.node, self.scope),
        }
    }
}

/// Thresholds and lexicons after config edits, ready for matching.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSettings {
    pub thresholds: Thresholds,
    pub ambiguous_link_text: Vec<String>,
    pub visual_phrases: Vec<String>,
    pub image_of_text_tokens: Vec<String>,
}

pub const DEFAULT_AMBIGUOUS_LINK_TEXT: &[&str] = &[
    "click here",
    "click",
    "here",
    "this",
    "this link",
    "link",
    "more",
    "read more",
    "learn more",
    "more info",
    "this page",
    "go here",
    "see here",
];

pub const DEFAULT_VISUAL_PHRASES: &[&str] = &[
    "as you can see",
    "note the highlighted",
    "you can see below",
    "shown above in",
    "look at the",
];

pub const DEFAULT_IMAGE_OF_TEXT_TOKENS: &[&str] =
    &["screenshot", "screen_shot", "code", "snippet", "terminal", "console"];

fn edit_lexicon(defaults: &[&str], add: &[String], remove: &[String]) -> Vec<String> {
    let norm = |s: &str| normalize_whitespace(&s.to_lowercase());
    let removed: Vec<String> = remove.iter().map(|s| norm(s)).collect();
    let mut out: Vec<String> = defaults
        .iter()
        .map(|s| norm(s))
        .chain(add.iter().map(|s| norm(s)))
        .filter(|s| !s.is_empty() && !removed.contains(s))
        .collect();
    out.dedup();
    out
}

impl RuleSettings {
    pub fn from_config(config: &Config) -> Self {
        let lx = &config.lexicons;
        RuleSettings {
            thresholds: config.thresholds.clone(),
            ambiguous_link_text: edit_lexicon(DEFAULT_AMBIGUOUS_LINK_TEXT, &lx.link_text_add, &lx.link_text_remove),
            visual_phrases: edit_lexicon(DEFAULT_VISUAL_PHRASES, &lx.visual_language_add, &lx.visual_language_remove),
            image_of_text_tokens: edit_lexicon(DEFAULT_IMAGE_OF_TEXT_TOKENS, &lx.image_of_text_tokens_add, &[]),
        }
    }
}

impl Default for RuleSettings {
    fn default() -> Self {
        RuleSettings::from_config(&Config::default())
    }
}

/// All document checks for one file, unfiltered.
pub fn document_findings(doc: &Document, settings: &RuleSettings) -> Vec<Finding> {
    let mut out = Vec::new();
    out.extend(check_headings(doc));
    out.extend(check_links(doc, settings));
    out.extend(check_alt_text(doc, settings));
    out.extend(check_suspicious_alt(doc));
    out.extend(check_contrast(doc, settings));
    out.extend(check_visual_language(doc, &settings.visual_phrases));
    out.extend(check_images_of_text(doc, settings));
    out.extend(check_ascii_diagrams(doc, settings));
    if doc.is_html() {
        out.extend(check_document_validity(doc));
    }
    out.extend(check_video_captions(doc));
    out
}

pub fn deck_findings(deck: &SlideDeck, settings: &RuleSettings) -> Vec<Finding> {
    let mut out = Vec::new();
    out.extend(check_reading_order(deck, settings));
    out.extend(check_offslide_invisible(deck));
    out.extend(check_group_alt(deck));
    out
}

/// Run every enabled rule over the corpus. Output is sorted by
/// (file, locator, rule) and byte-stable across runs.
pub fn run_rules(documents: &[Document], decks: &[SlideDeck], config: &Config) -> Vec<Finding> {
    let settings = RuleSettings::from_config(config);
    let mut findings: Vec<Finding> = documents
        .par_iter()
        .flat_map_iter(|d| document_findings(d, &settings))
        .chain(decks.par_iter().flat_map_iter(|d| deck_findings(d, &settings)))
        .filter(|f| config.rule_enabled(&f.rule_id))
        .map(|mut f| {
            if f.machine_decidable {
                if let Some(s) = config.severity_override(&f.rule_id) {
                    f.severity = s;
                }
            }
            f
        })
        .collect();
    sort_findings(&mut findings);
    findings
}

pub fn sort_findings(findings: &mut [Finding]) {
    findings.sort_by(finding_order);
}

pub fn finding_order(a: &Finding, b: &Finding) -> Ordering {
    a.file_path
        .cmp(&b.file_path)
        .then_with(|| natural_cmp(&a.locator, &b.locator))
        .then_with(|| a.rule_id.cmp(&b.rule_id))
        .then_with(|| a.source_line.cmp(&b.source_line))
        .then_with(|| a.message.cmp(&b.message))
        .then_with(|| a.snippet.cmp(&b.snippet))
        .then_with(|| a.anchor.cmp(&b.anchor))
}

/// String order where digit runs compare numerically (`p[2]` < `p[10]`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a.chars().next(), b.chars().next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let la = a.find(|c: char| !c.is_ascii_digit()).unwrap_or(a.len());
                let lb = b.find(|c: char| !c.is_ascii_digit()).unwrap_or(b.len());
                let (da, db) = (a[..la].trim_start_matches('0'), b[..lb].trim_start_matches('0'));
                let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db)).then_with(|| la.cmp(&lb));
                if ord != Ordering::Equal {
                    return ord;
                }
                a = &a[la..];
                b = &b[lb..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(&y);
                }
                a = &a[x.len_utf8()..];
                b = &b[y.len_utf8()..];
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::content::html::parse_html;
    use crate::content::markdown::parse_markdown;
    use crate::content::style::resolve_styles;
    use crate::content::{Document, MediaKind, SourceFile};

    pub fn html(src: &str) -> Document {
        let file = SourceFile::from_bytes("t.html", MediaKind::Html, src.as_bytes());
        resolve_styles(parse_html(file, src.as_bytes()).unwrap(), None).0
    }

    pub fn md(src: &str) -> Document {
        let file = SourceFile::from_bytes("t.md", MediaKind::Markdown, src.as_bytes());
        resolve_styles(parse_markdown(file, src.as_bytes()).unwrap(), None).0
    }

    /// A valid page wrapper so validity rules stay quiet.
    pub fn page(body: &str) -> Document {
        html(&format!(
            "<!DOCTYPE html><html lang=\"en\"><head><title>t</title></head><body><main>{body}</main></body></html>"
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_ids_unique() {
        let mut ids: Vec<_> = catalog().iter().map(|r| r.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), catalog().len());
        assert!(catalog().len() >= 17);
        let contrast = rule_info("contrast-minimum").unwrap();
        assert_eq!(contrast.wcag_ref, Some("1.4.3"));
    }

    #[test]
    fn natural_order() {
        assert_eq!(natural_cmp("/p[2]", "/p[10]"), Ordering::Less);
        assert_eq!(natural_cmp("slide[10]", "slide[9]"), Ordering::Greater);
        assert_eq!(natural_cmp("a", "a"), Ordering::Equal);
        assert_eq!(natural_cmp("/", "/html"), Ordering::Less);
        assert_eq!(natural_cmp("x01", "x1"), Ordering::Greater);
    }

    #[test]
    fn snippet_limit() {
        let long = "x".repeat(500);
        let s = truncate_snippet(&long);
        assert_eq!(s.chars().count(), SNIPPET_MAX);
        assert_eq!(truncate_snippet("short"), "short");
    }

    #[test]
    fn lexicon_edits() {
        let mut config = Config::default();
        config.lexicons.visual_language_add.push("  As   Shown ".into());
        config.lexicons.visual_language_remove.push("look at the".into());
        let s = RuleSettings::from_config(&config);
        assert!(s.visual_phrases.contains(&"as shown".to_string()));
        assert!(!s.visual_phrases.contains(&"look at the".to_string()));
    }
}
