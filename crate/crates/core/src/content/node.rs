use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::style::StyleInfo;
use super::SourceFile;

pub const ROOT: &str = "#root";
pub const TEXT: &str = "#text";

/// One node of the uniform tree shared by HTML and Markdown input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentNode {
    pub element: String,
    /// Source order; duplicate names are dropped at parse time (first wins).
    pub attributes: Vec<(String, String)>,
    pub text: Option<String>,
    pub children: Vec<ContentNode>,
    pub structural_path: String,
    pub source_line: Option<u32>,
}

impl ContentNode {
    pub fn element(name: impl Into<String>, line: Option<u32>) -> Self {
        ContentNode {
            element: name.into(),
            attributes: Vec::new(),
            text: None,
            children: Vec::new(),
            structural_path: String::new(),
            source_line: line,
        }
    }

    pub fn text(text: impl Into<String>, line: Option<u32>) -> Self {
        ContentNode {
            element: TEXT.to_string(),
            attributes: Vec::new(),
            text: Some(text.into()),
            children: Vec::new(),
            structural_path: String::new(),
            source_line: line,
        }
    }

    pub fn root() -> Self {
        ContentNode::element(ROOT, None)
    }

    pub fn is_text(&self) -> bool {
        self.element == TEXT
    }

    pub fn is_element(&self) -> bool {
        !self.element.starts_with('#')
    }

    pub fn is(&self, name: &str) -> bool {
        self.element == name
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn has_attr(&self, name: &str) -> bool {
        self.attr(name).is_some()
    }

    pub fn set_attr(&mut self, name: &str, value: impl Into<String>) {
        let value = value.into();
        match self.attributes.iter_mut().find(|(k, _)| k == name) {
            Some((_, v)) => *v = value,
            None => self.attributes.push((name.to_string(), value)),
        }
    }

    /// Whitespace-separated tokens of the `class` attribute.
    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.attr("class").unwrap_or("").split_ascii_whitespace()
    }

    /// Pre-order traversal including `self`.
    pub fn descendants(&self) -> Descendants<'_> {
        Descendants { stack: vec![self] }
    }

    /// Concatenated text of all descendant text nodes.
    pub fn text_content(&self) -> String {
        let mut out = String::new();
        for node in self.descendants() {
            if let Some(t) = &node.text {
                out.push_str(t);
            }
        }
        out
    }

    /// `text_content` with runs of whitespace collapsed and ends trimmed.
    pub fn normalized_text(&self) -> String {
        normalize_whitespace(&self.text_content())
    }

    /// True when a direct child is a text node with non-whitespace content.
    pub fn has_direct_text(&self) -> bool {
        self.children
            .iter()
            .any(|c| c.text.as_deref().is_some_and(|t| !t.trim().is_empty()))
    }

    pub fn find(&self, path: &str) -> Option<&ContentNode> {
        if self.structural_path == path {
            return Some(self);
        }
        if !path.starts_with(&self.structural_path) {
            return None;
        }
        self.children.iter().find_map(|c| c.find(path))
    }

    /// Opening tag as it would be written in HTML, used for snippets.
    pub fn open_tag(&self) -> String {
        let mut out = format!("<{}", self.element);
        for (k, v) in &self.attributes {
            out.push(' ');
            out.push_str(k);
            out.push_str("=\"");
            out.push_str(&v.replace('"', "&quot;"));
            out.push('"');
        }
        out.push('>');
        out
    }

    /// Assign structural paths to this subtree. The root keeps an empty path;
    /// each child appends one `/name[n]` segment, where `n` counts same-named
    /// siblings from 1. `html`, `head` and `body` omit the ordinal when it is 1.
    pub fn assign_paths(&mut self) {
        let base = if self.element == ROOT {
            String::new()
        } else {
            self.structural_path.clone()
        };
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut segments = Vec::with_capacity(self.children.len());
        for child in &self.children {
            let n = counts.entry(child.element.as_str()).or_insert(0);
            *n += 1;
            let singleton = matches!(child.element.as_str(), "html" | "head" | "body");
            segments.push(if singleton && *n == 1 {
                format!("{base}/{}", child.element)
            } else {
                format!("{base}/{}[{n}]", child.element)
            });
        }
        for (child, path) in self.children.iter_mut().zip(segments) {
            child.structural_path = path;
            child.assign_paths();
        }
    }
}

pub struct Descendants<'a> {
    stack: Vec<&'a ContentNode>,
}

impl<'a> Iterator for Descendants<'a> {
    type Item = &'a ContentNode;

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub message: String,
    pub source_line: Option<u32>,
}

/// A parsed HTML or Markdown file.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub file: SourceFile,
    pub root: ContentNode,
    pub title: Option<String>,
    pub lang: Option<String>,
    pub parse_diagnostics: Vec<ParseDiagnostic>,
    pub styles: BTreeMap<String, StyleInfo>,
}

impl Document {
    pub fn new(file: SourceFile, mut root: ContentNode) -> Self {
        root.assign_paths();
        Document {
            file,
            root,
            title: None,
            lang: None,
            parse_diagnostics: Vec::new(),
            styles: BTreeMap::new(),
        }
    }

    pub fn node(&self, path: &str) -> Option<&ContentNode> {
        self.root.find(path)
    }

    /// Resolved style for a node; nodes without an entry are `unknown`.
    pub fn style(&self, path: &str) -> StyleInfo {
        self.styles
            .get(path)
            .copied()
            .unwrap_or_else(StyleInfo::unknown)
    }

    pub fn is_html(&self) -> bool {
        self.file.media_kind == super::MediaKind::Html
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree() -> ContentNode {
        let mut root = ContentNode::root();
        let mut html = ContentNode::element("html", None);
        let mut body = ContentNode::element("body", None);
        for i in 0..3 {
            let mut p = ContentNode::element("p", None);
            p.children.push(ContentNode::text(format!("para {i}"), None));
            body.children.push(p);
        }
        body.children.push(ContentNode::element("img", None));
        html.children.push(body);
        root.children.push(html);
        root.assign_paths();
        root
    }

    #[test]
    fn paths_use_sibling_ordinals() {
        let root = tree();
        let paths: Vec<_> = root
            .descendants()
            .map(|n| n.structural_path.as_str())
            .collect();
        assert_eq!(
            paths,
            vec![
                "",
                "/html",
                "/html/body",
                "/html/body/p[1]",
                "/html/body/p[1]/#text[1]",
                "/html/body/p[2]",
                "/html/body/p[2]/#text[1]",
                "/html/body/p[3]",
                "/html/body/p[3]/#text[1]",
                "/html/body/img[1]",
            ]
        );
    }

    #[test]
    fn child_path_extends_parent_by_one_segment() {
        fn check(node: &ContentNode) {
            for c in &node.children {
                let rest = c.structural_path.strip_prefix(&node.structural_path).unwrap();
                assert!(rest.starts_with('/'));
                assert_eq!(rest.matches('/').count(), 1, "{}", c.structural_path);
                check(c);
            }
        }
        check(&tree());
    }

    #[test]
    fn find_by_path() {
        let root = tree();
        assert_eq!(root.find("/html/body/p[2]").unwrap().normalized_text(), "para 1");
        assert!(root.find("/html/body/p[9]").is_none());
    }
}
