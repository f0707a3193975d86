//! Neutral slide manifest (`*.slides.json`).
//!
//! ```json
//! {"version": 1, "slide_width": 16, "slide_height": 9,
//!  "slides": [{"index": 1,
//!              "elements": [{"id": "t", "kind": "text", "bbox": {"x":1,"y":0.5,"w":14,"h":1}, "text": "Title"}],
//!              "reading_order": ["t"]}]}
//! ```
//!
//! Units are abstract; only ratios to the slide size matter.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{decode_utf8, SourceFile};
use crate::error::{Error, Result};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Text,
    Image,
    Shape,
    Group,
}

impl ElementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Text => "text",
            ElementKind::Image => "image",
            ElementKind::Shape => "shape",
            ElementKind::Group => "group",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    /// No overlap at all with `[0,width] x [0,height]`. Touching an edge
    /// from outside counts as outside.
    pub fn entirely_outside(&self, width: f64, height: f64) -> bool {
        self.x >= width || self.x + self.w <= 0.0 || self.y >= height || self.y + self.h <= 0.0
    }
}

fn default_visible() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlideElement {
    pub id: String,
    pub kind: ElementKind,
    pub bbox: BBox,
    #[serde(default = "default_visible")]
    pub visible: bool,
    #[serde(default)]
    pub alt: Option<String>,
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub children: Vec<String>,
}

impl SlideElement {
    pub fn has_text(&self) -> bool {
        self.text.as_deref().is_some_and(|t| !t.trim().is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slide {
    pub index: u32,
    pub elements: Vec<SlideElement>,
    /// `None` means the author never specified an order.
    #[serde(default)]
    pub reading_order: Option<Vec<String>>,
}

impl Slide {
    pub fn element(&self, id: &str) -> Option<&SlideElement> {
        self.elements.iter().find(|e| e.id == id)
    }

    /// Child id → parent group id.
    pub fn parents(&self) -> BTreeMap<&str, &str> {
        let mut out = BTreeMap::new();
        for e in &self.elements {
            for c in &e.children {
                out.insert(c.as_str(), e.id.as_str());
            }
        }
        out
    }

    /// Elements that are not a child of any group, in manifest order.
    pub fn top_level(&self) -> impl Iterator<Item = &SlideElement> {
        let parents = self.parents();
        let child_ids: BTreeSet<String> = parents.keys().map(|s| s.to_string()).collect();
        self.elements
            .iter()
            .filter(move |e| !child_ids.contains(&e.id))
    }

    /// Non-group descendants of `group`, expanding nested groups.
    pub fn leaves<'a>(&'a self, group: &'a SlideElement) -> Vec<&'a SlideElement> {
        let mut out = Vec::new();
        let mut stack: Vec<&str> = group.children.iter().rev().map(String::as_str).collect();
        let mut seen = BTreeSet::new();
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            let Some(e) = self.element(id) else { continue };
            if e.kind == ElementKind::Group {
                stack.extend(e.children.iter().rev().map(String::as_str));
            } else {
                out.push(e);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlideDeck {
    pub source: SourceFile,
    pub slide_width: f64,
    pub slide_height: f64,
    pub slides: Vec<Slide>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    version: u32,
    slide_width: f64,
    slide_height: f64,
    slides: Vec<Slide>,
}

pub fn parse_slide_manifest(file: SourceFile, bytes: &[u8]) -> Result<SlideDeck> {
    let text = decode_utf8(&file, bytes)?;
    let schema = |location: String, message: String| Error::Schema {
        path: file.path.clone(),
        location,
        message,
    };
    let de = &mut serde_json::Deserializer::from_str(text);
    let manifest: Manifest = serde_path_to_error::deserialize(de).map_err(|e| {
        let location = match e.path().to_string() {
            p if p == "." => "$".to_string(),
            p => p,
        };
        schema(location, e.inner().to_string())
    })?;
    validate(&manifest).map_err(|(loc, msg)| schema(loc, msg))?;
    Ok(SlideDeck {
        source: file,
        slide_width: manifest.slide_width,
        slide_height: manifest.slide_height,
        slides: manifest.slides,
    })
}

type Violation = (String, String);

fn validate(m: &Manifest) -> std::result::Result<(), Violation> {
    if m.version != MANIFEST_VERSION {
        return Err((
            "version".into(),
            format!("unsupported manifest version {} (expected {MANIFEST_VERSION})", m.version),
        ));
    }
    for (name, v) in [("slide_width", m.slide_width), ("slide_height", m.slide_height)] {
        if !(v.is_finite() && v > 0.0) {
            return Err((name.into(), format!("must be a positive number, got {v}")));
        }
    }
    let mut indices = BTreeSet::new();
    for (si, slide) in m.slides.iter().enumerate() {
        let at = |rest: &str| format!("slides[{si}]{rest}");
        if slide.index == 0 {
            return Err((at(".index"), "slide index is 1-based".into()));
        }
        if !indices.insert(slide.index) {
            return Err((at(".index"), format!("duplicate slide index {}", slide.index)));
        }
        validate_slide(slide, &at)?;
    }
    Ok(())
}

fn validate_slide(slide: &Slide, at: &dyn Fn(&str) -> String) -> std::result::Result<(), Violation> {
    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    for (ei, e) in slide.elements.iter().enumerate() {
        if e.id.is_empty() {
            return Err((at(&format!(".elements[{ei}].id")), "element id is empty".into()));
        }
        if ids.insert(&e.id, ei).is_some() {
            return Err((
                at(&format!(".elements[{ei}].id")),
                format!("duplicate element id {:?}", e.id),
            ));
        }
        let b = e.bbox;
        if ![b.x, b.y, b.w, b.h].iter().all(|v| v.is_finite()) || b.w < 0.0 || b.h < 0.0 {
            return Err((
                at(&format!(".elements[{ei}].bbox")),
                "bbox must be finite with w, h >= 0".into(),
            ));
        }
        if e.kind != ElementKind::Group && !e.children.is_empty() {
            return Err((
                at(&format!(".elements[{ei}].children")),
                format!("only groups may have children ({:?} is {})", e.id, e.kind.as_str()),
            ));
        }
    }

    let mut parent_of: BTreeMap<&str, &str> = BTreeMap::new();
    for (ei, e) in slide.elements.iter().enumerate() {
        for c in &e.children {
            let loc = at(&format!(".elements[{ei}].children"));
            if !ids.contains_key(c.as_str()) {
                return Err((loc, format!("unknown child id {c:?}")));
            }
            if let Some(prev) = parent_of.insert(c, &e.id) {
                if prev != e.id {
                    return Err((loc, format!("element {c:?} has two parents ({prev:?}, {:?})", e.id)));
                }
                return Err((loc, format!("child {c:?} listed twice")));
            }
        }
    }
    // With single parents, a cycle is a parent chain that revisits an id.
    for (ei, e) in slide.elements.iter().enumerate() {
        let mut seen = BTreeSet::new();
        let mut cur = e.id.as_str();
        while let Some(&p) = parent_of.get(cur) {
            if !seen.insert(p) || p == e.id {
                return Err((at(&format!(".elements[{ei}].children")), "group membership cycle".into()));
            }
            cur = p;
        }
    }

    if let Some(order) = &slide.reading_order {
        let loc = at(".reading_order");
        let mut listed = BTreeSet::new();
        for id in order {
            if !ids.contains_key(id.as_str()) {
                return Err((loc, format!("unknown element id {id:?}")));
            }
            if parent_of.contains_key(id.as_str()) {
                return Err((loc, format!("{id:?} is a group member, not a top-level element")));
            }
            if !listed.insert(id.as_str()) {
                return Err((loc, format!("duplicate element id {id:?}")));
            }
        }
        if let Some(missing) = slide
            .elements
            .iter()
            .find(|e| e.visible && !parent_of.contains_key(e.id.as_str()) && !listed.contains(e.id.as_str()))
        {
            return Err((loc, format!("missing element id {:?}", missing.id)));
        }
    }
    Ok(())
}
