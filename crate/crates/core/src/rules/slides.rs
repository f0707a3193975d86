//! Reading order, off-slide, hidden-element and group checks over slide
//! manifests. Slide units are abstract; only ratios to the slide size matter.

use std::collections::BTreeSet;

use super::{text_anchor, truncate_snippet, Finding, RuleSettings, Severity};
use crate::content::{ElementKind, Slide, SlideDeck, SlideElement};

/// Visible, on-canvas, top-level elements in row bands: sorted by top edge,
/// a band holds every element whose top is within `band_tolerance *
/// slide_height` of the band's first element; bands run top to bottom and
/// each band left to right, ties broken by id.
pub fn geometric_order(slide: &Slide, slide_width: f64, slide_height: f64, band_tolerance: f64) -> Vec<String> {
    let mut elements: Vec<&SlideElement> = slide
        .top_level()
        .filter(|e| e.visible && !e.bbox.entirely_outside(slide_width, slide_height))
        .collect();
    elements.sort_by(|a, b| {
        a.bbox
            .y
            .total_cmp(&b.bbox.y)
            .then_with(|| a.bbox.x.total_cmp(&b.bbox.x))
            .then_with(|| a.id.cmp(&b.id))
    });
    let tolerance = band_tolerance * slide_height;
    let mut bands: Vec<Vec<&SlideElement>> = Vec::new();
    for e in elements {
        match bands.last_mut() {
            Some(band) if e.bbox.y - band[0].bbox.y <= tolerance => band.push(e),
            _ => bands.push(vec![e]),
        }
    }
    bands
        .into_iter()
        .flat_map(|mut band| {
            band.sort_by(|a, b| a.bbox.x.total_cmp(&b.bbox.x).then_with(|| a.id.cmp(&b.id)));
            band.into_iter().map(|e| e.id.clone())
        })
        .collect()
}

fn slide_locator(slide: &Slide) -> String {
    format!("slide[{}]", slide.index)
}

fn element_locator(slide: &Slide, e: &SlideElement) -> String {
    format!("slide[{}]/element[{}]", slide.index, e.id)
}

fn element_snippet(e: &SlideElement) -> String {
    let label = e.text.as_deref().or(e.alt.as_deref()).unwrap_or("");
    let label = crate::content::normalize_whitespace(label);
    if label.is_empty() {
        truncate_snippet(&format!("{} {}", e.kind.as_str(), e.id))
    } else {
        truncate_snippet(&format!("{} {}: {label}", e.kind.as_str(), e.id))
    }
}

fn element_finding(
    deck: &SlideDeck,
    slide: &Slide,
    e: &SlideElement,
    rule_id: &str,
    severity: Severity,
    message: String,
    fix_hint: &str,
) -> Finding {
    Finding {
        rule_id: rule_id.into(),
        severity,
        file_path: deck.source.path.clone(),
        locator: element_locator(slide, e),
        source_line: None,
        snippet: element_snippet(e),
        message,
        fix_hint: fix_hint.into(),
        machine_decidable: severity != Severity::NeedsHumanReview,
        element: e.kind.as_str().into(),
        src: None,
        anchor: text_anchor(&[
            e.kind.as_str(),
            &e.id,
            e.alt.as_deref().unwrap_or("\u{0}"),
            e.text.as_deref().unwrap_or("\u{0}"),
            &e.children.join("\u{1f}"),
        ]),
    }
}

/// Identity of a slide by its set of element ids.
fn slide_anchor(slide: &Slide) -> String {
    let ids: BTreeSet<&str> = slide.elements.iter().map(|e| e.id.as_str()).collect();
    text_anchor(&["slide", &ids.into_iter().collect::<Vec<_>>().join("\u{1f}")])
}

pub fn check_reading_order(deck: &SlideDeck, settings: &RuleSettings) -> Vec<Finding> {
    let mut out = Vec::new();
    for slide in &deck.slides {
        let Some(order) = &slide.reading_order else {
            out.push(Finding {
                rule_id: "slide-reading-order".into(),
                severity: Severity::Warning,
                file_path: deck.source.path.clone(),
                locator: slide_locator(slide),
                source_line: None,
                snippet: truncate_snippet(&format!("slide {} ({} elements)", slide.index, slide.elements.len())),
                message: "slide has no reading order".into(),
                fix_hint: "Set the reading order so screen readers announce elements in sequence.".into(),
                machine_decidable: true,
                element: "slide".into(),
                src: None,
                anchor: slide_anchor(slide),
            });
            continue;
        };
        let geometric = geometric_order(slide, deck.slide_width, deck.slide_height, settings.thresholds.band_tolerance);
        let placed: BTreeSet<&str> = geometric.iter().map(String::as_str).collect();
        let restricted: Vec<&str> = order.iter().map(String::as_str).filter(|id| placed.contains(id)).collect();
        let first_off = restricted
            .iter()
            .zip(&geometric)
            .position(|(a, b)| *a != b.as_str());
        if let Some(i) = first_off {
            let id = restricted[i];
            let e = slide.element(id).expect("validated id");
            out.push(element_finding(
                deck,
                slide,
                e,
                "slide-reading-order",
                Severity::NeedsHumanReview,
                format!(
                    "reading order position {} is \"{id}\" but the layout suggests \"{}\"",
                    i + 1,
                    geometric[i]
                ),
                "Check the reading order against the visual layout.",
            ));
        }
    }
    out
}

/// `slide-offcanvas` for elements entirely outside the slide and
/// `slide-invisible-in-order` for hidden elements listed in the reading order.
pub fn check_offslide_invisible(deck: &SlideDeck) -> Vec<Finding> {
    let mut out = Vec::new();
    for slide in &deck.slides {
        for e in &slide.elements {
            if e.bbox.entirely_outside(deck.slide_width, deck.slide_height) {
                out.push(element_finding(
                    deck,
                    slide,
                    e,
                    "slide-offcanvas",
                    Severity::Error,
                    format!("{} \"{}\" lies entirely outside the slide", e.kind.as_str(), e.id),
                    "Move the element onto the slide or delete it.",
                ));
            }
        }
        for id in slide.reading_order.iter().flatten() {
            let e = slide.element(id).expect("validated id");
            if !e.visible {
                out.push(element_finding(
                    deck,
                    slide,
                    e,
                    "slide-invisible-in-order",
                    Severity::Error,
                    format!("hidden {} \"{}\" is in the reading order", e.kind.as_str(), e.id),
                    "Remove the hidden element from the reading order or delete it.",
                ));
            }
        }
    }
    out
}

fn unlabeled_picture(slide: &Slide, group: &SlideElement) -> bool {
    let leaves = slide.leaves(group);
    group.alt.is_none()
        && !leaves.is_empty()
        && leaves
            .iter()
            .all(|l| matches!(l.kind, ElementKind::Image | ElementKind::Shape) && !l.has_text())
}

/// Groups made only of images and shapes need a group-level description.
/// Groups nested in a labelled or already-flagged group are skipped.
pub fn check_group_alt(deck: &SlideDeck) -> Vec<Finding> {
    let mut out = Vec::new();
    for slide in &deck.slides {
        let parents = slide.parents();
        let covered = |e: &SlideElement| {
            let mut cur = parents.get(e.id.as_str()).copied();
            while let Some(p) = cur {
                let pe = slide.element(p).expect("validated id");
                if pe.alt.is_some() || (pe.visible && unlabeled_picture(slide, pe)) {
                    return true;
                }
                cur = parents.get(p).copied();
            }
            false
        };
        for g in slide.elements.iter().filter(|e| e.kind == ElementKind::Group) {
            if g.visible && unlabeled_picture(slide, g) && !covered(g) {
                out.push(element_finding(
                    deck,
                    slide,
                    g,
                    "slide-group-alt",
                    Severity::NeedsHumanReview,
                    format!("group \"{}\" of images and shapes has no alt text", g.id),
                    "Describe what the grouped drawing shows in the group's alt text.",
                ));
            }
        }
    }
    out
}
