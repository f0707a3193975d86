use std::sync::LazyLock;

use regex::Regex;

use super::{AnchorScope, Finding, Hit, RuleSettings, Severity};
use crate::content::{ContentNode, Document};

static IMAGE_FILENAME: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^[^\s/\\]+\.(?:png|jpe?g|gif|svg|webp|bmp|tiff?|heic|avif)$").unwrap()
});

/// Last path segment of a URL, without query or fragment.
pub(crate) fn src_basename(src: &str) -> &str {
    let end = src.find(['?', '#']).unwrap_or(src.len());
    let path = &src[..end];
    path.rsplit(['/', '\\']).next().unwrap_or(path)
}

fn hidden_from_assistive_tech(img: &ContentNode) -> bool {
    matches!(img.attr("role"), Some("presentation" | "none"))
        || img.attr("aria-hidden") == Some("true")
}

fn has_aria_name(img: &ContentNode) -> bool {
    ["aria-label", "aria-labelledby"]
        .iter()
        .any(|a| img.attr(a).is_some_and(|v| !v.trim().is_empty()))
}

/// `alt-missing` for images without an alt attribute and `alt-length` for
/// alt text over the configured length. `alt=""` marks an image decorative.
pub fn check_alt_text(doc: &Document, settings: &RuleSettings) -> Vec<Finding> {
    let limit = settings.thresholds.alt_length;
    let mut hits = Vec::new();
    for img in doc.root.descendants().filter(|n| n.is("img")) {
        match img.attr("alt") {
            None if hidden_from_assistive_tech(img) || has_aria_name(img) => {}
            None => hits.push(Hit {
                rule_id: "alt-missing",
                severity: Severity::Error,
                node: img,
                scope: AnchorScope::Content,
                message: "image has no alt attribute".into(),
                fix_hint: "Describe the image in alt, or use alt=\"\" if it is decorative.".into(),
            }),
            Some(alt) => {
                let len = alt.trim().chars().count();
                if len > limit {
                    hits.push(Hit {
                        rule_id: "alt-length",
                        severity: Severity::Warning,
                        node: img,
                        scope: AnchorScope::Content,
                        message: format!("alt text is {len} characters (limit {limit})"),
                        fix_hint: "Shorten the alt and move the detail into a caption or nearby text.".into(),
                    });
                }
            }
        }
    }
    hits.into_iter().map(|h| h.into_finding(doc)).collect()
}

/// Looks like a generated identifier such as `59DLABynUwR0QimwfHHCIc0W`.
fn looks_generated(alt: &str) -> bool {
    if alt.len() < 16 || !alt.chars().all(|c| c.is_ascii_alphanumeric()) {
        return false;
    }
    let upper = alt.chars().filter(|c| c.is_ascii_uppercase()).count();
    let lower = alt.chars().filter(|c| c.is_ascii_lowercase()).count();
    let digits = alt.chars().any(|c| c.is_ascii_digit());
    let inner_upper = alt.chars().skip(1).filter(|c| c.is_ascii_uppercase()).count();
    upper > 0 && lower > 0 && (digits || inner_upper >= 3)
}

pub fn check_suspicious_alt(doc: &Document) -> Vec<Finding> {
    let mut hits = Vec::new();
    for img in doc.root.descendants().filter(|n| n.is("img")) {
        let Some(alt) = img.attr("alt").map(str::trim).filter(|a| !a.is_empty()) else {
            continue;
        };
        let basename = img.attr("src").map(src_basename).unwrap_or("");
        let reason = if !basename.is_empty() && alt.eq_ignore_ascii_case(basename) {
            "alt text is the image file name"
        } else if IMAGE_FILENAME.is_match(alt) {
            "alt text is a file name"
        } else if looks_generated(alt) {
            "alt text looks like a generated identifier"
        } else {
            continue;
        };
        hits.push(Hit {
            rule_id: "alt-suspicious",
            severity: Severity::NeedsHumanReview,
            node: img,
            scope: AnchorScope::Content,
            message: format!("{reason}: \"{alt}\""),
            fix_hint: "Replace the alt with a short description of what the image shows.".into(),
        });
    }
    hits.into_iter().map(|h| h.into_finding(doc)).collect()
}

/// Lowercase words split at non-alphanumerics and camelCase boundaries.
fn words(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut prev_lower = false;
    for c in s.chars() {
        if !c.is_alphanumeric() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            prev_lower = false;
            continue;
        }
        if c.is_uppercase() && prev_lower && !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
        prev_lower = c.is_lowercase() || c.is_ascii_digit();
        cur.extend(c.to_lowercase());
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn contains_token(haystack: &[String], token: &[String]) -> bool {
    !token.is_empty() && haystack.windows(token.len()).any(|w| w == token)
}

pub fn check_images_of_text(doc: &Document, settings: &RuleSettings) -> Vec<Finding> {
    let tokens: Vec<(String, Vec<String>)> = settings
        .image_of_text_tokens
        .iter()
        .map(|t| (t.clone(), words(t)))
        .collect();
    let mut hits = Vec::new();
    for img in doc.root.descendants().filter(|n| n.is("img")) {
        let sources = [
            ("file name", img.attr("src").map(src_basename).unwrap_or("")),
            ("alt text", img.attr("alt").unwrap_or("")),
        ];
        let found = sources.iter().find_map(|(what, s)| {
            let w = words(s);
            tokens
                .iter()
                .find(|(_, t)| contains_token(&w, t))
                .map(|(t, _)| (*what, t))
        });
        if let Some((what, token)) = found {
            hits.push(Hit {
                rule_id: "image-of-text",
                severity: Severity::NeedsHumanReview,
                node: img,
                scope: AnchorScope::Content,
                message: format!("{what} mentions \"{token}\"; image may contain text"),
                fix_hint: "If the image shows code or terminal output, include it as text instead.".into(),
            });
        }
    }
    hits.into_iter().map(|h| h.into_finding(doc)).collect()
}
