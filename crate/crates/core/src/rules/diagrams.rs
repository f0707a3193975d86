use super::{AnchorScope, Finding, Hit, RuleSettings, Severity};
use crate::content::Document;

fn is_box_drawing(c: char) -> bool {
    ('\u{2500}'..='\u{257F}').contains(&c)
}

fn is_diagram_char(c: char) -> bool {
    matches!(c, '|' | '+' | '-' | '/' | '\\' | '_' | '<' | '>') || is_box_drawing(c)
}

fn is_vertical(c: char) -> bool {
    c == '|' || is_box_drawing(c)
}

/// Fraction of non-whitespace characters that are line-drawing characters.
pub fn diagram_density(text: &str) -> f64 {
    let (mut drawing, mut total) = (0usize, 0usize);
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        total += 1;
        if is_diagram_char(c) {
            drawing += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        drawing as f64 / total as f64
    }
}

/// Some column holds a vertical stroke on at least two lines.
fn has_aligned_verticals(lines: &[&str]) -> bool {
    let mut columns = std::collections::HashMap::<usize, usize>::new();
    for line in lines {
        let mut seen = std::collections::HashSet::new();
        for (col, c) in line.chars().enumerate() {
            if is_vertical(c) && seen.insert(col) {
                *columns.entry(col).or_default() += 1;
            }
        }
    }
    columns.values().any(|&n| n >= 2)
}

pub fn looks_like_diagram(text: &str, density_threshold: f64) -> bool {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    lines.len() >= 3 && diagram_density(text) > density_threshold && has_aligned_verticals(&lines)
}

pub fn check_ascii_diagrams(doc: &Document, settings: &RuleSettings) -> Vec<Finding> {
    let threshold = settings.thresholds.ascii_density;
    let mut hits = Vec::new();
    for pre in doc.root.descendants().filter(|n| n.is("pre")) {
        let text = pre.text_content();
        if looks_like_diagram(&text, threshold) {
            hits.push(Hit {
                rule_id: "ascii-diagram",
                severity: Severity::NeedsHumanReview,
                node: pre,
                scope: AnchorScope::Content,
                message: format!(
                    "preformatted block looks like a text drawing ({:.0}% line-drawing characters)",
                    diagram_density(&text) * 100.0
                ),
                fix_hint: "Replace the drawing with an image that has alt text, or describe it in prose.".into(),
            });
        }
    }
    hits.into_iter().map(|h| h.into_finding(doc)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::test_support::md;

    fn run(src: &str) -> Vec<Finding> {
        check_ascii_diagrams(&md(src), &RuleSettings::default())
    }

    #[test]
    fn box_is_flagged() {
        let f = run("```\n+--+\n|  |\n|  |\n+--+\n```\n");
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].element, "pre");
        assert!(run("```\n┌──┐\n│ab│\n└──┘\n```\n").len() == 1);
    }

    #[test]
    fn ordinary_code_is_clean() {
        let code = "```java\nfor (int i = 0; i < n; i++) {\n    if (a[i] > max) {\n        max = a[i];\n    }\n}\n```\n";
        assert!(run(code).is_empty());
        let py = "```python\ndef f(x):\n    return x - 1 if x > 0 else -x\n\nprint(f(3))\n```\n";
        assert!(run(py).is_empty());
    }

    #[test]
    fn too_short() {
        assert!(run("```\na -> b\n```\n").is_empty());
        assert!(run("```\n|--|\n|--|\n```\n").is_empty());
    }
}
