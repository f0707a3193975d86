use super::color::contrast_ratio;
use super::{AnchorScope, Finding, Hit, RuleSettings, Severity};
use crate::content::{Confidence, ContentNode, Document, Rgb};

const NOT_RENDERED: &[&str] = &["head", "script", "style", "template", "noscript", "title"];

/// Text at least `large_pt`, or `large_bold_pt` and bold, is "large" and
/// needs the lower ratio.
pub fn required_ratio(font_size_pt: f64, bold: bool, settings: &RuleSettings) -> f64 {
    let t = &settings.thresholds;
    if font_size_pt >= t.large_pt || (bold && font_size_pt >= t.large_bold_pt) {
        t.contrast_large
    } else {
        t.contrast_normal
    }
}

type Verdict = (Rgb, Rgb, u64);

struct Walk<'a> {
    doc: &'a Document,
    settings: &'a RuleSettings,
    hits: Vec<Hit<'a>>,
}

impl<'a> Walk<'a> {
    /// `reported` is the nearest text-bearing ancestor's colours and
    /// requirement; a descendant with the same values would repeat it.
    fn visit(&mut self, node: &'a ContentNode, reported: Option<Verdict>) {
        if NOT_RENDERED.contains(&node.element.as_str()) {
            return;
        }
        let mut reported = reported;
        if node.is_element() && node.has_direct_text() {
            let style = self.doc.style(&node.structural_path);
            if style.confidence != Confidence::Unknown {
                let required = required_ratio(style.font_size_pt, style.bold, self.settings);
                let verdict = (style.foreground, style.background, required.to_bits());
                if reported != Some(verdict) {
                    let ratio = contrast_ratio(style.foreground, style.background);
                    if ratio < required {
                        let Rgb(fr, fg, fb) = style.foreground;
                        let Rgb(br, bg, bb) = style.background;
                        self.hits.push(Hit {
                            rule_id: "contrast-minimum",
                            severity: Severity::Error,
                            node,
                            scope: AnchorScope::Content,
                            message: format!(
                                "contrast {ratio:.2}:1 is below the required {required}:1 \
                                 (rgb({fr},{fg},{fb}) on rgb({br},{bg},{bb}))"
                            ),
                            fix_hint: format!("Darken the text or lighten the background to reach {required}:1."),
                        });
                    }
                }
                reported = Some(verdict);
            }
        }
        for child in &node.children {
            self.visit(child, reported);
        }
    }
}

pub fn check_contrast(doc: &Document, settings: &RuleSettings) -> Vec<Finding> {
    let mut walk = Walk {
        doc,
        settings,
        hits: Vec::new(),
    };
    walk.visit(&doc.root, None);
    walk.hits.into_iter().map(|h| h.into_finding(doc)).collect()
}
