use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;

use super::{AnchorScope, Finding, Hit, RuleSettings, Severity};
use crate::content::{normalize_whitespace, ContentNode, Document};

const RULE: &str = "link-text";

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^(?:[a-z][a-z0-9+.-]*://|www\.|mailto:)\S+$").unwrap());

/// `aria-label` if set, else the link's text with alt text of contained images.
pub(crate) fn accessible_name(a: &ContentNode) -> String {
    if let Some(label) = a.attr("aria-label").map(str::trim).filter(|l| !l.is_empty()) {
        return normalize_whitespace(label);
    }
    let mut out = String::new();
    for n in a.descendants() {
        if let Some(t) = &n.text {
            out.push_str(t);
        } else if n.is("img") {
            if let Some(alt) = n.attr("alt") {
                out.push(' ');
                out.push_str(alt);
                out.push(' ');
            }
        }
    }
    normalize_whitespace(&out)
}

fn fold(name: &str) -> String {
    name.to_lowercase()
        .trim_end_matches(['.', ',', ':', ';', '!', '?', '…'])
        .trim()
        .to_string()
}

pub fn check_links(doc: &Document, settings: &RuleSettings) -> Vec<Finding> {
    let mut hits = Vec::new();
    let mut first_href: HashMap<String, String> = HashMap::new();
    for a in doc.root.descendants().filter(|n| n.is("a")) {
        let Some(href) = a.attr("href") else { continue };
        let href = href.trim();
        let name = accessible_name(a);
        let folded = fold(&name);
        let problem = if name.is_empty() {
            Some((
                "link has no text".to_string(),
                "Add link text, or alt text on the image inside the link.",
            ))
        } else if settings.ambiguous_link_text.contains(&folded) {
            Some((
                format!("ambiguous link text \"{name}\""),
                "Describe the destination, e.g. \"Assignment 3 specification\".",
            ))
        } else if name == href || URL.is_match(&name) {
            Some((
                format!("raw URL as link text \"{name}\""),
                "Replace the URL with a description of the destination.",
            ))
        } else {
            None
        };
        if let Some((message, hint)) = problem {
            hits.push(Hit {
                rule_id: RULE,
                severity: Severity::Error,
                node: a,
                scope: AnchorScope::Content,
                message,
                fix_hint: hint.into(),
            });
            continue;
        }
        match first_href.get(&folded) {
            Some(prev) if prev != href => hits.push(Hit {
                rule_id: RULE,
                severity: Severity::Warning,
                node: a,
                scope: AnchorScope::Content,
                message: format!("link text \"{name}\" is also used for a different destination"),
                fix_hint: "Make each link's text distinguish its destination.".into(),
            }),
            Some(_) => {}
            None => {
                first_href.insert(folded, href.to_string());
            }
        }
    }
    hits.into_iter().map(|h| h.into_finding(doc)).collect()
}
