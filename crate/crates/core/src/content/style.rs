//! Best-effort text colour and size resolution.
//!
//! There is no layout engine here. Static resolution reads inline `style`
//! attributes and same-document `<style>` rules whose selectors are a single
//! element name or a single class. Colour inherits from the nearest ancestor
//! that sets it, background from the nearest ancestor that paints one.
//! Anything that cannot be determined (gradients, background images,
//! translucent colours, unparseable values) makes the node `unknown`; the
//! contrast rule skips those rather than guessing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::node::{ContentNode, Document};
use crate::error::{Error, Result};

pub const DEFAULT_FONT_PT: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const BLACK: Rgb = Rgb(0, 0, 0);
    pub const WHITE: Rgb = Rgb(255, 255, 255);

    pub fn from_hex24(v: u32) -> Rgb {
        Rgb((v >> 16) as u8, (v >> 8) as u8, v as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Static,
    Computed,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StyleInfo {
    pub foreground: Rgb,
    pub background: Rgb,
    pub font_size_pt: f64,
    pub bold: bool,
    pub confidence: Confidence,
}

impl StyleInfo {
    pub fn unknown() -> Self {
        StyleInfo {
            foreground: Rgb::BLACK,
            background: Rgb::WHITE,
            font_size_pt: DEFAULT_FONT_PT,
            bold: false,
            confidence: Confidence::Unknown,
        }
    }
}

/// One entry of a computed-style sidecar. Missing fields fall back to the
/// static resolution of the same node.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarEntry {
    #[serde(default)]
    pub foreground: Option<Rgb>,
    #[serde(default)]
    pub background: Option<Rgb>,
    #[serde(default)]
    pub font_size_pt: Option<f64>,
    #[serde(default)]
    pub bold: Option<bool>,
}

/// Browser-computed styles keyed by structural path.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StyleSidecar(pub BTreeMap<String, SidecarEntry>);

impl StyleSidecar {
    pub fn from_json(label: &str, bytes: &[u8]) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let sidecar: StyleSidecar = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::malformed("style sidecar", label, e))?;
        for (path, entry) in &sidecar.0 {
            if let Some(size) = entry.font_size_pt {
                if !(size.is_finite() && size > 0.0) {
                    return Err(Error::malformed(
                        "style sidecar",
                        label,
                        format!("{path}: font_size_pt must be positive"),
                    ));
                }
            }
        }
        Ok(sidecar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Paint {
    Color(Rgb),
    Transparent,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum FontSize {
    Pt(f64),
    Scale(f64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Declarations {
    color: Option<Paint>,
    background: Option<Paint>,
    font_size: Option<FontSize>,
    bold: Option<bool>,
}

impl Declarations {
    fn overlay(&mut self, other: &Declarations) {
        self.color = other.color.or(self.color);
        self.background = other.background.or(self.background);
        self.font_size = other.font_size.or(self.font_size);
        self.bold = other.bold.or(self.bold);
    }
}

fn parse_declarations(block: &str) -> Declarations {
    let mut d = Declarations::default();
    for decl in block.split(';') {
        let Some((prop, value)) = decl.split_once(':') else {
            continue;
        };
        let prop = prop.trim().to_ascii_lowercase();
        let value = value.trim().to_ascii_lowercase();
        let value = value.trim_end_matches("!important").trim();
        match prop.as_str() {
            "color" => {
                if let Some(p) = parse_paint(value) {
                    d.color = Some(match p {
                        Paint::Transparent => Paint::Unknown,
                        p => p,
                    });
                }
            }
            "background-color" => {
                if let Some(p) = parse_paint(value) {
                    d.background = Some(p);
                }
            }
            "background" => d.background = Some(parse_background(value)),
            "background-image" => {
                if value != "none" && !is_css_wide(value) {
                    d.background = Some(Paint::Unknown);
                }
            }
            "font-size" => {
                if let Some(s) = parse_font_size(value) {
                    d.font_size = Some(s);
                }
            }
            "font-weight" => {
                d.bold = match value {
                    "bold" | "bolder" => Some(true),
                    "normal" | "lighter" => Some(false),
                    n => n.parse::<f64>().ok().map(|w| w >= 700.0),
                }
            }
            _ => {}
        }
    }
    d
}

fn is_css_wide(v: &str) -> bool {
    matches!(v, "inherit" | "initial" | "unset" | "revert" | "revert-layer" | "currentcolor")
}

fn parse_paint(value: &str) -> Option<Paint> {
    if is_css_wide(value) {
        return None;
    }
    if value == "transparent" {
        return Some(Paint::Transparent);
    }
    Some(match parse_color(value) {
        Some((rgb, alpha)) if alpha >= 1.0 => Paint::Color(rgb),
        Some((_, alpha)) if alpha <= 0.0 => Paint::Transparent,
        _ => Paint::Unknown,
    })
}

fn parse_background(value: &str) -> Paint {
    if value.contains("url(") || value.contains("gradient(") || value.contains("image(") {
        return Paint::Unknown;
    }
    if is_css_wide(value) {
        return Paint::Transparent;
    }
    split_top_level(value)
        .into_iter()
        .filter_map(parse_paint)
        .find(|p| *p != Paint::Unknown)
        .unwrap_or(Paint::Transparent)
}

/// Split on whitespace that is not inside parentheses.
fn split_top_level(value: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, c) in value.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c.is_whitespace() && depth == 0 => {
                if let Some(s) = start.take() {
                    out.push(&value[s..i]);
                }
                continue;
            }
            _ => {}
        }
        start.get_or_insert(i);
    }
    if let Some(s) = start {
        out.push(&value[s..]);
    }
    out
}

fn parse_font_size(value: &str) -> Option<FontSize> {
    let keyword = match value {
        "xx-small" => Some(FontSize::Pt(6.75)),
        "x-small" => Some(FontSize::Pt(7.5)),
        "small" => Some(FontSize::Pt(9.75)),
        "medium" => Some(FontSize::Pt(12.0)),
        "large" => Some(FontSize::Pt(13.5)),
        "x-large" => Some(FontSize::Pt(18.0)),
        "xx-large" => Some(FontSize::Pt(24.0)),
        "xxx-large" => Some(FontSize::Pt(36.0)),
        "smaller" => Some(FontSize::Scale(1.0 / 1.2)),
        "larger" => Some(FontSize::Scale(1.2)),
        _ => None,
    };
    if keyword.is_some() {
        return keyword;
    }
    let split = value
        .find(|c: char| !(c.is_ascii_digit() || c == '.'))
        .unwrap_or(value.len());
    let (num, unit) = value.split_at(split);
    let n: f64 = num.parse().ok().filter(|n: &f64| *n > 0.0)?;
    match unit.trim() {
        "pt" => Some(FontSize::Pt(n)),
        "px" => Some(FontSize::Pt(n * 0.75)),
        "em" => Some(FontSize::Scale(n)),
        "%" => Some(FontSize::Scale(n / 100.0)),
        "rem" => Some(FontSize::Pt(n * DEFAULT_FONT_PT)),
        _ => None,
    }
}

/// Parse a CSS colour. Returns the colour and its alpha in `[0,1]`.
pub fn parse_color(value: &str) -> Option<(Rgb, f64)> {
    let v = value.trim().to_ascii_lowercase();
    if let Some(hex) = v.strip_prefix('#') {
        if !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return None;
        }
        let digit = |i: usize| u8::from_str_radix(&hex[i..i + 1], 16).ok().map(|d| d * 17);
        let pair = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
        return match hex.len() {
            3 | 4 => {
                let a = if hex.len() == 4 { digit(3)? } else { 255 };
                Some((Rgb(digit(0)?, digit(1)?, digit(2)?), a as f64 / 255.0))
            }
            6 | 8 => {
                let a = if hex.len() == 8 { pair(6)? } else { 255 };
                Some((Rgb(pair(0)?, pair(2)?, pair(4)?), a as f64 / 255.0))
            }
            _ => None,
        };
    }
    if let Some(args) = functional(&v, &["rgb", "rgba"]) {
        let (parts, alpha) = color_args(args)?;
        let ch = |s: &str| -> Option<u8> {
            let val = match s.strip_suffix('%') {
                Some(p) => p.parse::<f64>().ok()? * 2.55,
                None => s.parse::<f64>().ok()?,
            };
            Some(val.round().clamp(0.0, 255.0) as u8)
        };
        return Some((Rgb(ch(parts[0])?, ch(parts[1])?, ch(parts[2])?), alpha));
    }
    if let Some(args) = functional(&v, &["hsl", "hsla"]) {
        let (parts, alpha) = color_args(args)?;
        let h = parts[0].trim_end_matches("deg").parse::<f64>().ok()?;
        let s = parts[1].trim_end_matches('%').parse::<f64>().ok()? / 100.0;
        let l = parts[2].trim_end_matches('%').parse::<f64>().ok()? / 100.0;
        return Some((hsl_to_rgb(h, s.clamp(0.0, 1.0), l.clamp(0.0, 1.0)), alpha));
    }
    NAMED_COLORS
        .binary_search_by(|(name, _)| name.cmp(&v.as_str()))
        .ok()
        .map(|i| (Rgb::from_hex24(NAMED_COLORS[i].1), 1.0))
}

fn functional<'a>(v: &'a str, names: &[&str]) -> Option<&'a str> {
    let open = v.find('(')?;
    if !names.contains(&v[..open].trim()) {
        return None;
    }
    v[open + 1..].strip_suffix(')')
}

/// Three components plus optional alpha, comma- or space-separated.
fn color_args(args: &str) -> Option<(Vec<&str>, f64)> {
    let (main, slash_alpha) = match args.split_once('/') {
        Some((m, a)) => (m, Some(a.trim())),
        None => (args, None),
    };
    let parts: Vec<&str> = main
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    let (parts, alpha) = match (parts.len(), slash_alpha) {
        (3, None) => (parts, None),
        (3, Some(a)) => (parts, Some(a)),
        (4, None) => (parts[..3].to_vec(), Some(parts[3])),
        _ => return None,
    };
    let alpha = match alpha {
        None => 1.0,
        Some(a) => match a.strip_suffix('%') {
            Some(p) => p.parse::<f64>().ok()? / 100.0,
            None => a.parse::<f64>().ok()?,
        },
    };
    Some((parts, alpha.clamp(0.0, 1.0)))
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> Rgb {
    let h = h.rem_euclid(360.0) / 360.0;
    let q = if l < 0.5 { l * (1.0 + s) } else { l + s - l * s };
    let p = 2.0 * l - q;
    let hue = |mut t: f64| {
        if t < 0.0 {
            t += 1.0;
        }
        if t > 1.0 {
            t -= 1.0;
        }
        let v = if t < 1.0 / 6.0 {
            p + (q - p) * 6.0 * t
        } else if t < 0.5 {
            q
        } else if t < 2.0 / 3.0 {
            p + (q - p) * (2.0 / 3.0 - t) * 6.0
        } else {
            p
        };
        (v * 255.0).round().clamp(0.0, 255.0) as u8
    };
    Rgb(hue(h + 1.0 / 3.0), hue(h), hue(h - 1.0 / 3.0))
}

#[derive(Debug, Clone, PartialEq)]
enum Selector {
    Element(String),
    Class(String),
}

#[derive(Debug, Default)]
struct StyleSheet {
    rules: Vec<(Selector, Declarations)>,
}

impl StyleSheet {
    fn parse(css: &str) -> StyleSheet {
        let css = strip_comments(css);
        let mut sheet = StyleSheet::default();
        let bytes = css.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let Some(rel) = css[i..].find(['{', ';']) else { break };
            let prelude = css[i..i + rel].trim();
            if bytes[i + rel] == b';' {
                // `@import ...;` and similar statements
                i += rel + 1;
                continue;
            }
            let body_start = i + rel + 1;
            let mut depth = 1;
            let mut j = body_start;
            while j < bytes.len() && depth > 0 {
                match bytes[j] {
                    b'{' => depth += 1,
                    b'}' => depth -= 1,
                    _ => {}
                }
                j += 1;
            }
            let body_end = if depth == 0 { j - 1 } else { j };
            if !prelude.starts_with('@') {
                let decls = parse_declarations(&css[body_start..body_end]);
                for sel in prelude.split(',') {
                    if let Some(s) = parse_selector(sel.trim()) {
                        sheet.rules.push((s, decls));
                    }
                }
            }
            i = j;
        }
        sheet
    }

    /// Element rules apply before class rules; within each, source order.
    fn declarations_for(&self, node: &ContentNode) -> Declarations {
        let mut d = Declarations::default();
        for (sel, decls) in &self.rules {
            if matches!(sel, Selector::Element(name) if *name == node.element) {
                d.overlay(decls);
            }
        }
        for (sel, decls) in &self.rules {
            if matches!(sel, Selector::Class(class) if node.classes().any(|c| c == class)) {
                d.overlay(decls);
            }
        }
        d
    }
}

fn strip_comments(css: &str) -> String {
    let mut out = String::with_capacity(css.len());
    let mut rest = css;
    while let Some(start) = rest.find("/*") {
        out.push_str(&rest[..start]);
        match rest[start + 2..].find("*/") {
            Some(end) => rest = &rest[start + 2 + end + 2..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}

fn parse_selector(sel: &str) -> Option<Selector> {
    let ident = |s: &str| {
        !s.is_empty()
            && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_' || c == '-')
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    };
    match sel.strip_prefix('.') {
        Some(class) if ident(class) => Some(Selector::Class(class.to_string())),
        None if ident(sel) && sel.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) => {
            Some(Selector::Element(sel.to_ascii_lowercase()))
        }
        _ => None,
    }
}

fn ua_defaults(element: &str) -> (Option<f64>, bool) {
    match element {
        "h1" => (Some(2.0), true),
        "h2" => (Some(1.5), true),
        "h3" => (Some(1.17), true),
        "h4" => (Some(1.0), true),
        "h5" => (Some(0.83), true),
        "h6" => (Some(0.67), true),
        "small" | "sub" | "sup" => (Some(0.83), false),
        "b" | "strong" | "th" => (None, true),
        _ => (None, false),
    }
}

#[derive(Debug, Clone, Copy)]
struct Inherited {
    color: Option<Paint>,
    background: Option<Paint>,
    size_pt: f64,
    bold: bool,
}

struct Resolved {
    /// Nodes with enough colour information for a static verdict.
    static_styles: BTreeMap<String, StyleInfo>,
    /// Size/weight and whatever colours are known, for every element.
    base: BTreeMap<String, StyleInfo>,
}

fn walk(node: &ContentNode, inh: Inherited, sheet: &StyleSheet, out: &mut Resolved) {
    if !node.is_element() && node.element != super::ROOT {
        return;
    }
    let mut here = inh;
    if node.is_element() {
        let mut decls = sheet.declarations_for(node);
        if let Some(inline) = node.attr("style") {
            decls.overlay(&parse_declarations(inline));
        }
        let (scale, ua_bold) = ua_defaults(&node.element);
        here.size_pt = match decls.font_size {
            Some(FontSize::Pt(pt)) => pt,
            Some(FontSize::Scale(s)) => inh.size_pt * s,
            None => inh.size_pt * scale.unwrap_or(1.0),
        };
        here.bold = decls.bold.unwrap_or(ua_bold || inh.bold);
        if let Some(c) = decls.color {
            here.color = Some(c);
        }
        match decls.background {
            Some(Paint::Transparent) | None => {}
            Some(p) => here.background = Some(p),
        }

        let color = |p: Option<Paint>, default: Rgb| match p {
            Some(Paint::Color(c)) => Some(c),
            Some(Paint::Unknown) => None,
            Some(Paint::Transparent) | None => Some(default),
        };
        let fg = color(here.color, Rgb::BLACK);
        let bg = color(here.background, Rgb::WHITE);
        let info = StyleInfo {
            foreground: fg.unwrap_or(Rgb::BLACK),
            background: bg.unwrap_or(Rgb::WHITE),
            font_size_pt: here.size_pt,
            bold: here.bold,
            confidence: Confidence::Static,
        };
        out.base.insert(node.structural_path.clone(), info);
        let declared = here.color.is_some() || here.background.is_some();
        if declared && fg.is_some() && bg.is_some() {
            out.static_styles.insert(node.structural_path.clone(), info);
        }
    }
    for child in &node.children {
        walk(child, here, sheet, out);
    }
}

/// Fill `doc.styles`. Returns sidecar keys that matched no node.
pub fn resolve_styles(mut doc: Document, sidecar: Option<&StyleSidecar>) -> (Document, Vec<String>) {
    let mut sheet = StyleSheet::default();
    for node in doc.root.descendants().filter(|n| n.is("style")) {
        let media = node.attr("media").unwrap_or("all").to_ascii_lowercase();
        if media.contains("screen") || media.contains("all") {
            sheet.rules.extend(StyleSheet::parse(&node.text_content()).rules);
        }
    }
    let mut resolved = Resolved {
        static_styles: BTreeMap::new(),
        base: BTreeMap::new(),
    };
    let start = Inherited {
        color: None,
        background: None,
        size_pt: DEFAULT_FONT_PT,
        bold: false,
    };
    walk(&doc.root, start, &sheet, &mut resolved);

    let mut styles = resolved.static_styles;
    let mut unmatched = Vec::new();
    if let Some(sidecar) = sidecar {
        for (path, entry) in &sidecar.0 {
            if doc.node(path).is_none() {
                unmatched.push(path.clone());
                continue;
            }
            let base = styles
                .get(path)
                .or_else(|| resolved.base.get(path))
                .copied()
                .unwrap_or_else(StyleInfo::unknown);
            styles.insert(
                path.clone(),
                StyleInfo {
                    foreground: entry.foreground.unwrap_or(base.foreground),
                    background: entry.background.unwrap_or(base.background),
                    font_size_pt: entry.font_size_pt.unwrap_or(base.font_size_pt),
                    bold: entry.bold.unwrap_or(base.bold),
                    confidence: Confidence::Computed,
                },
            );
        }
    }
    doc.styles = styles;
    (doc, unmatched)
}

/// CSS named colours, sorted by name for binary search.
const NAMED_COLORS: &[(&str, u32)] = &[
    ("aliceblue", 0xf0f8ff),
    ("antiquewhite", 0xfaebd7),
    ("aqua", 0x00ffff),
    ("aquamarine", 0x7fffd4),
    ("azure", 0xf0ffff),
    ("beige", 0xf5f5dc),
    ("bisque", 0xffe4c4),
    ("black", 0x000000),
    ("blanchedalmond", 0xffebcd),
    ("blue", 0x0000ff),
    ("blueviolet", 0x8a2be2),
    ("brown", 0xa52a2a),
    ("burlywood", 0xdeb887),
    ("cadetblue", 0x5f9ea0),
    ("chartreuse", 0x7fff00),
    ("chocolate", 0xd2691e),
    ("coral", 0xff7f50),
    ("cornflowerblue", 0x6495ed),
    ("cornsilk", 0xfff8dc),
    ("crimson", 0xdc143c),
    ("cyan", 0x00ffff),
    ("darkblue", 0x00008b),
    ("darkcyan", 0x008b8b),
    ("darkgoldenrod", 0xb8860b),
    ("darkgray", 0xa9a9a9),
    ("darkgreen", 0x006400),
    ("darkgrey", 0xa9a9a9),
    ("darkkhaki", 0xbdb76b),
    ("darkmagenta", 0x8b008b),
    ("darkolivegreen", 0x556b2f),
    ("darkorange", 0xff8c00),
    ("darkorchid", 0x9932cc),
    ("darkred", 0x8b0000),
    ("darksalmon", 0xe9967a),
    ("darkseagreen", 0x8fbc8f),
    ("darkslateblue", 0x483d8b),
    ("darkslategray", 0x2f4f4f),
    ("darkslategrey", 0x2f4f4f),
    ("darkturquoise", 0x00ced1),
    ("darkviolet", 0x9400d3),
    ("deeppink", 0xff1493),
    ("deepskyblue", 0x00bfff),
    ("dimgray", 0x696969),
    ("dimgrey", 0x696969),
    ("dodgerblue", 0x1e90ff),
    ("firebrick", 0xb22222),
    ("floralwhite", 0xfffaf0),
    ("forestgreen", 0x228b22),
    ("fuchsia", 0xff00ff),
    ("gainsboro", 0xdcdcdc),
    ("ghostwhite", 0xf8f8ff),
    ("gold", 0xffd700),
    ("goldenrod", 0xdaa520),
    ("gray", 0x808080),
    ("green", 0x008000),
    ("greenyellow", 0xadff2f),
    ("grey", 0x808080),
    ("honeydew", 0xf0fff0),
    ("hotpink", 0xff69b4),
    ("indianred", 0xcd5c5c),
    ("indigo", 0x4b0082),
    ("ivory", 0xfffff0),
    ("khaki", 0xf0e68c),
    ("lavender", 0xe6e6fa),
    ("lavenderblush", 0xfff0f5),
    ("lawngreen", 0x7cfc00),
    ("lemonchiffon", 0xfffacd),
    ("lightblue", 0xadd8e6),
    ("lightcoral", 0xf08080),
    ("lightcyan", 0xe0ffff),
    ("lightgoldenrodyellow", 0xfafad2),
    ("lightgray", 0xd3d3d3),
    ("lightgreen", 0x90ee90),
    ("lightgrey", 0xd3d3d3),
    ("lightpink", 0xffb6c1),
    ("lightsalmon", 0xffa07a),
    ("lightseagreen", 0x20b2aa),
    ("lightskyblue", 0x87cefa),
    ("lightslategray", 0x778899),
    ("lightslategrey", 0x778899),
    ("lightsteelblue", 0xb0c4de),
    ("lightyellow", 0xffffe0),
    ("lime", 0x00ff00),
    ("limegreen", 0x32cd32),
    ("linen", 0xfaf0e6),
    ("magenta", 0xff00ff),
    ("maroon", 0x800000),
    ("mediumaquamarine", 0x66cdaa),
    ("mediumblue", 0x0000cd),
    ("mediumorchid", 0xba55d3),
    ("mediumpurple", 0x9370db),
    ("mediumseagreen", 0x3cb371),
    ("mediumslateblue", 0x7b68ee),
    ("mediumspringgreen", 0x00fa9a),
    ("mediumturquoise", 0x48d1cc),
    ("mediumvioletred", 0xc71585),
    ("midnightblue", 0x191970),
    ("mintcream", 0xf5fffa),
    ("mistyrose", 0xffe4e1),
    ("moccasin", 0xffe4b5),
    ("navajowhite", 0xffdead),
    ("navy", 0x000080),
    ("oldlace", 0xfdf5e6),
    ("olive", 0x808000),
    ("olivedrab", 0x6b8e23),
    ("orange", 0xffa500),
    ("orangered", 0xff4500),
    ("orchid", 0xda70d6),
    ("palegoldenrod", 0xeee8aa),
    ("palegreen", 0x98fb98),
    ("paleturquoise", 0xafeeee),
    ("palevioletred", 0xdb7093),
    ("papayawhip", 0xffefd5),
    ("peachpuff", 0xffdab9),
    ("peru", 0xcd853f),
    ("pink", 0xffc0cb),
    ("plum", 0xdda0dd),
    ("powderblue", 0xb0e0e6),
    ("purple", 0x800080),
    ("rebeccapurple", 0x663399),
    ("red", 0xff0000),
    ("rosybrown", 0xbc8f8f),
    ("royalblue", 0x4169e1),
    ("saddlebrown", 0x8b4513),
    ("salmon", 0xfa8072),
    ("sandybrown", 0xf4a460),
    ("seagreen", 0x2e8b57),
    ("seashell", 0xfff5ee),
    ("sienna", 0xa0522d),
    ("silver", 0xc0c0c0),
    ("skyblue", 0x87ceeb),
    ("slateblue", 0x6a5acd),
    ("slategray", 0x708090),
    ("slategrey", 0x708090),
    ("snow", 0xfffafa),
    ("springgreen", 0x00ff7f),
    ("steelblue", 0x4682b4),
    ("tan", 0xd2b48c),
    ("teal", 0x008080),
    ("thistle", 0xd8bfd8),
    ("tomato", 0xff6347),
    ("turquoise", 0x40e0d0),
    ("violet", 0xee82ee),
    ("wheat", 0xf5deb3),
    ("white", 0xffffff),
    ("whitesmoke", 0xf5f5f5),
    ("yellow", 0xffff00),
    ("yellowgreen", 0x9acd32),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::html::parse_html;
    use crate::content::{MediaKind, SourceFile};

    fn doc(src: &str) -> Document {
        let file = SourceFile::from_bytes("t.html", MediaKind::Html, src.as_bytes());
        parse_html(file, src.as_bytes()).unwrap()
    }

    #[test]
    fn named_colors_sorted() {
        assert!(NAMED_COLORS.windows(2).all(|w| w[0].0 < w[1].0));
        assert_eq!(NAMED_COLORS.len(), 148);
    }

    #[test]
    fn color_syntaxes() {
        assert_eq!(parse_color("#000"), Some((Rgb(0, 0, 0), 1.0)));
        assert_eq!(parse_color("#767676"), Some((Rgb(118, 118, 118), 1.0)));
        assert_eq!(parse_color("rgb(118, 118, 118)"), Some((Rgb(118, 118, 118), 1.0)));
        assert_eq!(parse_color("rgb(255 0 0 / 50%)").unwrap().1, 0.5);
        assert_eq!(parse_color("rgba(0,0,0,0)").unwrap().1, 0.0);
        assert_eq!(parse_color("White"), Some((Rgb::WHITE, 1.0)));
        assert_eq!(parse_color("hsl(0, 100%, 50%)"), Some((Rgb(255, 0, 0), 1.0)));
        assert_eq!(parse_color("hsl(120 100% 25%)"), Some((Rgb(0, 128, 0), 1.0)));
        assert_eq!(parse_color("#12"), None);
        assert_eq!(parse_color("notacolor"), None);
    }

    #[test]
    fn inline_style_is_static() {
        let (d, _) = resolve_styles(doc(r#"<p style="color:#000;background-color:#fff">x</p>"#), None);
        let s = d.style("/html/body/p[1]");
        assert_eq!(s.foreground, Rgb(0, 0, 0));
        assert_eq!(s.background, Rgb(255, 255, 255));
        assert_eq!(s.confidence, Confidence::Static);
    }

    #[test]
    fn unstyled_is_unknown() {
        let (d, _) = resolve_styles(doc("<p>x</p>"), None);
        assert_eq!(d.style("/html/body/p[1]").confidence, Confidence::Unknown);
        assert!(d.styles.is_empty());
    }

    #[test]
    fn sidecar_overrides_static() {
        let d = doc(r#"<p style="color:#000">x</p>"#);
        let sidecar = StyleSidecar::from_json(
            "s",
            br#"{"/html/body/p[1]": {"foreground": [118,118,118], "background": [255,255,255], "font_size_pt": 12, "bold": false}}"#,
        )
        .unwrap();
        let (d, unmatched) = resolve_styles(d, Some(&sidecar));
        assert!(unmatched.is_empty());
        let s = d.style("/html/body/p[1]");
        assert_eq!(s.foreground, Rgb(118, 118, 118));
        assert_eq!(s.confidence, Confidence::Computed);
    }

    #[test]
    fn sidecar_partial_entry_keeps_static_fields() {
        let d = doc(r#"<h2 style="background:#222">x</h2>"#);
        let sidecar = StyleSidecar::from_json("s", br#"{"/html/body/h2[1]": {"foreground": [200,200,200]}}"#).unwrap();
        let (d, _) = resolve_styles(d, Some(&sidecar));
        let s = d.style("/html/body/h2[1]");
        assert_eq!(s.background, Rgb(0x22, 0x22, 0x22));
        assert_eq!(s.font_size_pt, 18.0);
        assert!(s.bold);
    }

    #[test]
    fn sidecar_unknown_path_reported() {
        let sidecar = StyleSidecar::from_json("s", br#"{"/html/body/p[7]": {}}"#).unwrap();
        let (d, unmatched) = resolve_styles(doc("<p>x</p>"), Some(&sidecar));
        assert_eq!(unmatched, vec!["/html/body/p[7]".to_string()]);
        assert!(d.styles.is_empty());
    }

    #[test]
    fn malformed_sidecar() {
        assert!(StyleSidecar::from_json("s", b"[1,2]").is_err());
        assert!(StyleSidecar::from_json("s", br#"{"/p": {"foreground": [300,0,0]}}"#).is_err());
        assert!(StyleSidecar::from_json("s", br#"{"/p": {"colour": [0,0,0]}}"#).is_err());
        assert!(StyleSidecar::from_json("s", br#"{"/p": {"font_size_pt": -1}}"#).is_err());
    }

    #[test]
    fn style_block_selectors() {
        let src = r#"<style>
            /* theme */
            @media print { p { color: red } }
            p { color: #333 }
            .muted, div > p { color: #999 }
            .card { background: #000 url(x.png) }
        </style>
        <p>a</p><p class="muted">b</p><div class="card"><p>c</p></div>"#;
        let (d, _) = resolve_styles(doc(src), None);
        assert_eq!(d.style("/html/body/p[1]").foreground, Rgb(0x33, 0x33, 0x33));
        assert_eq!(d.style("/html/body/p[2]").foreground, Rgb(0x99, 0x99, 0x99));
        assert_eq!(d.style("/html/body/div[1]/p[1]").confidence, Confidence::Unknown);
    }

    #[test]
    fn background_comes_from_nearest_painted_ancestor() {
        let src = r#"<div style="background-color:#000"><section style="background: transparent"><p style="color:#777">x</p></section></div>"#;
        let (d, _) = resolve_styles(doc(src), None);
        let s = d.style("/html/body/div[1]/section[1]/p[1]");
        assert_eq!(s.background, Rgb::BLACK);
        assert_eq!(s.foreground, Rgb(0x77, 0x77, 0x77));
    }

    #[test]
    fn translucent_and_gradient_are_unknown() {
        let (d, _) = resolve_styles(
            doc(r#"<p style="color: rgba(0,0,0,.5)">a</p><p style="background: linear-gradient(red, blue)">b</p>"#),
            None,
        );
        assert_eq!(d.style("/html/body/p[1]").confidence, Confidence::Unknown);
        assert_eq!(d.style("/html/body/p[2]").confidence, Confidence::Unknown);
    }

    #[test]
    fn font_sizes() {
        let src = r#"<div style="color:#000;font-size:24px"><p style="font-size:1.5em">a</p><b>b</b><span style="font-weight:700">c</span></div>"#;
        let (d, _) = resolve_styles(doc(src), None);
        assert_eq!(d.style("/html/body/div[1]").font_size_pt, 18.0);
        assert_eq!(d.style("/html/body/div[1]/p[1]").font_size_pt, 27.0);
        assert!(d.style("/html/body/div[1]/b[1]").bold);
        assert!(d.style("/html/body/div[1]/span[1]").bold);
        assert!(!d.style("/html/body/div[1]").bold);
    }

    #[test]
    fn every_style_key_resolves() {
        let src = r#"<style>.x{color:#111}</style><main class="x"><p>a<span>b</span></p></main>"#;
        let (d, _) = resolve_styles(doc(src), None);
        assert!(!d.styles.is_empty());
        for key in d.styles.keys() {
            assert!(d.node(key).is_some(), "{key}");
        }
    }
}
