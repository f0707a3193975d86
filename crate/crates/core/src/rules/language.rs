use super::{AnchorScope, Finding, Hit, Severity};
use crate::content::{normalize_whitespace, ContentNode, Document};

const BLOCKS: &[&str] = &[
    "p", "li", "h1", "h2", "h3", "h4", "h5", "h6", "td", "th", "dt", "dd", "blockquote",
    "figcaption", "caption", "summary", "div", "section", "article", "aside", "main", "header",
    "footer", "nav", "figure", "ul", "ol", "dl", "table", "tr", "details",
];

fn is_block(node: &ContentNode) -> bool {
    BLOCKS.contains(&node.element.as_str())
}

/// Text belonging to this block itself: nested blocks are checked on their
/// own and code is not prose.
fn own_text(node: &ContentNode, out: &mut String) {
    for child in &node.children {
        if let Some(t) = &child.text {
            out.push_str(t);
        } else if !is_block(child) && !matches!(child.element.as_str(), "pre" | "code" | "script" | "style") {
            own_text(child, out);
        } else {
            out.push(' ');
        }
    }
}

pub fn check_visual_language(doc: &Document, phrases: &[String]) -> Vec<Finding> {
    let mut hits = Vec::new();
    for node in doc.root.descendants().filter(|n| is_block(n)) {
        let mut text = String::new();
        own_text(node, &mut text);
        let text = normalize_whitespace(&text.to_lowercase());
        if text.is_empty() {
            continue;
        }
        if let Some(phrase) = phrases.iter().find(|p| text.contains(p.as_str())) {
            hits.push(Hit {
                rule_id: "visual-language",
                severity: Severity::NeedsHumanReview,
                node,
                scope: AnchorScope::Content,
                message: format!("text assumes the reader can see the content (\"{phrase}\")"),
                fix_hint: "Say what is shown rather than pointing at it, e.g. \"The output below is 10\".".into(),
            });
        }
    }
    hits.into_iter().map(|h| h.into_finding(doc)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::test_support::{md, page};
    use crate::rules::RuleSettings;

    fn run(body: &str) -> Vec<Finding> {
        check_visual_language(&page(body), &RuleSettings::default().visual_phrases)
    }

    #[test]
    fn phrases() {
        assert_eq!(run("<p>As you can see, the loop ends.</p>").len(), 1);
        assert_eq!(run("<p>You can   see below the output</p>").len(), 1);
        assert!(run("<p>The loop iterates 10 times</p>").is_empty());
    }

    #[test]
    fn innermost_block_only() {
        let f = run("<ul><li><p>Look at the <em>table</em></p></li></ul>");
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].element, "p");
    }

    #[test]
    fn code_is_ignored() {
        assert!(run("<p>Call <code>look_at_the(x)</code> to see.</p>").is_empty());
        let doc = md("```\n// as you can see\n```\n");
        assert!(check_visual_language(&doc, &RuleSettings::default().visual_phrases).is_empty());
    }
}
