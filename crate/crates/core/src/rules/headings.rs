use super::{AnchorScope, Finding, Hit, Severity};
use crate::content::{ContentNode, Document};

const RULE: &str = "heading-structure";

pub(crate) fn heading_level(node: &ContentNode) -> Option<u8> {
    match node.element.as_str() {
        "h1" => Some(1),
        "h2" => Some(2),
        "h3" => Some(3),
        "h4" => Some(4),
        "h5" => Some(5),
        "h6" => Some(6),
        _ => None,
    }
}

/// Text a screen reader would announce for a heading: its text plus the
/// alt of any images inside it.
fn has_name(node: &ContentNode) -> bool {
    !node.normalized_text().is_empty()
        || node
            .descendants()
            .any(|n| n.is("img") && n.attr("alt").is_some_and(|a| !a.trim().is_empty()))
}

pub fn check_headings(doc: &Document) -> Vec<Finding> {
    let mut hits = Vec::new();
    let mut prev: Option<u8> = None;
    let mut seen_h1 = false;
    let mut any_heading = false;
    for node in doc.root.descendants() {
        let Some(level) = heading_level(node) else { continue };
        any_heading = true;
        if !has_name(node) {
            hits.push(Hit {
                rule_id: RULE,
                severity: Severity::Error,
                node,
                scope: AnchorScope::Content,
                message: format!("<{}> has no text", node.element),
                fix_hint: "Give the heading text or remove it.".into(),
            });
        }
        if level == 1 {
            if seen_h1 {
                hits.push(Hit {
                    rule_id: RULE,
                    severity: Severity::Error,
                    node,
                    scope: AnchorScope::Content,
                    message: "more than one <h1> on the page".into(),
                    fix_hint: "Keep a single <h1> for the page title and demote the others.".into(),
                });
            }
            seen_h1 = true;
        }
        if let Some(p) = prev {
            if level > p + 1 {
                hits.push(Hit {
                    rule_id: RULE,
                    severity: Severity::Error,
                    node,
                    scope: AnchorScope::Content,
                    message: format!("heading level skips from h{p} to h{level}"),
                    fix_hint: format!("Use <h{}> here or add the missing intermediate level.", p + 1),
                });
            }
        }
        prev = Some(level);
    }
    if !any_heading {
        let paragraphs = doc
            .root
            .descendants()
            .filter(|n| n.is("p") && !n.normalized_text().is_empty())
            .count();
        if paragraphs > 1 {
            let at = doc.node("/html/body").unwrap_or(&doc.root);
            hits.push(Hit {
                rule_id: RULE,
                severity: Severity::Warning,
                node: at,
                scope: AnchorScope::Tag,
                message: format!("{paragraphs} paragraphs but no headings"),
                fix_hint: "Add headings that outline the content.".into(),
            });
        }
    }
    hits.into_iter().map(|h| h.into_finding(doc)).collect()
}
