//! Error-recovering HTML parser.
//!
//! Not a full HTML5 tree builder. It handles the constructs that show up in
//! course pages (implied end tags for `p`, list items and table parts, void
//! and raw-text elements, entity references) and records what it had to
//! repair as [`ParseDiagnostic`]s. Every element remembers the line of its
//! start tag.

use super::node::{ContentNode, Document, ParseDiagnostic, ROOT};
use super::{decode_utf8, SourceFile};
use crate::error::Result;

const VOID: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "keygen", "link", "meta", "param",
    "source", "track", "wbr",
];

/// Elements whose content is not markup.
const RAW_TEXT: &[&str] = &[
    "script", "style", "textarea", "title", "xmp", "iframe", "noembed", "noframes",
];

/// Elements that may legitimately be left open.
const OPTIONAL_END: &[&str] = &[
    "html", "head", "body", "p", "li", "dt", "dd", "option", "optgroup", "tr", "td", "th",
    "thead", "tbody", "tfoot", "colgroup", "caption", "rt", "rp",
];

/// Start tags that close an open `p`.
const CLOSES_P: &[&str] = &[
    "address", "article", "aside", "blockquote", "details", "dialog", "div", "dl", "fieldset",
    "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header",
    "hgroup", "hr", "main", "menu", "nav", "ol", "p", "pre", "section", "table", "ul",
];

const P_SCOPE_BOUNDARY: &[&str] = &[
    "button", "table", "td", "th", "caption", "object", "marquee", "applet", "template", "html",
    "body",
];

const HEAD_ELEMENTS: &[&str] = &[
    "title", "meta", "link", "base", "style", "script", "noscript", "template",
];

fn is_heading(name: &str) -> bool {
    matches!(name, "h1" | "h2" | "h3" | "h4" | "h5" | "h6")
}

/// Parse a whole HTML document. The result always has `/html/head` and
/// `/html/body`; stray top-level content is moved into them.
pub fn parse_html(file: SourceFile, bytes: &[u8]) -> Result<Document> {
    let src = decode_utf8(&file, bytes)?;
    let (root, diagnostics) = build(src, 0, false);
    let mut root = normalize_document(root);
    strip_whitespace(&mut root, false);

    let mut doc = Document::new(file, root);
    let html = doc.root.children.first();
    doc.lang = html
        .and_then(|h| h.attr("lang"))
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string);
    doc.title = doc
        .root
        .descendants()
        .find(|n| n.is("title"))
        .map(|t| t.normalized_text())
        .filter(|t| !t.is_empty());
    doc.parse_diagnostics = diagnostics;
    Ok(doc)
}

/// Parse a snippet of HTML (e.g. a raw block inside Markdown). `html`,
/// `head` and `body` tags are ignored; lines are offset by `first_line - 1`.
pub fn parse_fragment(src: &str, first_line: u32) -> (Vec<ContentNode>, Vec<ParseDiagnostic>) {
    let (mut root, diagnostics) = build(src, first_line.saturating_sub(1), true);
    strip_whitespace(&mut root, false);
    (root.children, diagnostics)
}

#[derive(Debug)]
enum Token {
    Start {
        name: String,
        attrs: Vec<(String, String)>,
        self_closing: bool,
        line: u32,
    },
    End {
        name: String,
        line: u32,
    },
    Text {
        text: String,
        line: u32,
    },
}

struct Tokenizer<'a> {
    src: &'a str,
    pos: usize,
    line_starts: Vec<usize>,
    line_offset: u32,
    diagnostics: Vec<ParseDiagnostic>,
    pending: Option<Token>,
}

impl<'a> Tokenizer<'a> {
    fn new(src: &'a str, line_offset: u32) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        Tokenizer {
            src,
            pos: 0,
            line_starts,
            line_offset,
            diagnostics: Vec::new(),
            pending: None,
        }
    }

    fn line_at(&self, pos: usize) -> u32 {
        let idx = self.line_starts.partition_point(|&s| s <= pos);
        idx as u32 + self.line_offset
    }

    fn diag(&mut self, message: String, pos: usize) {
        let line = self.line_at(pos);
        self.diagnostics.push(ParseDiagnostic {
            message,
            source_line: Some(line),
        });
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn next_token(&mut self) -> Option<Token> {
        if let Some(t) = self.pending.take() {
            return Some(t);
        }
        loop {
            if self.pos >= self.src.len() {
                return None;
            }
            let rest = self.rest();
            let Some(lt) = rest.find('<') else {
                let start = self.pos;
                self.pos = self.src.len();
                return Some(self.text_token(start, rest));
            };
            if lt > 0 {
                let start = self.pos;
                self.pos += lt;
                return Some(self.text_token(start, &rest[..lt]));
            }
            let start = self.pos;
            let after = &rest[1..];
            if let Some(body) = after.strip_prefix("!--") {
                match body.find("-->") {
                    Some(end) => self.pos += 4 + end + 3,
                    None => {
                        self.diag("unterminated comment".into(), start);
                        self.pos = self.src.len();
                    }
                }
                continue;
            }
            if after.starts_with('!') || after.starts_with('?') {
                // doctype, CDATA, processing instruction
                match after.find('>') {
                    Some(end) => self.pos += 1 + end + 1,
                    None => self.pos = self.src.len(),
                }
                continue;
            }
            if let Some(end_body) = after.strip_prefix('/') {
                if end_body.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Some(self.end_tag(start));
                }
                // `</>` or `</ 3`: skip to '>'
                match after.find('>') {
                    Some(end) => self.pos += 1 + end + 1,
                    None => self.pos = self.src.len(),
                }
                continue;
            }
            if after.starts_with(|c: char| c.is_ascii_alphabetic()) {
                return Some(self.start_tag(start));
            }
            self.pos += 1;
            return Some(Token::Text {
                text: "<".into(),
                line: self.line_at(start),
            });
        }
    }

    fn text_token(&self, start: usize, raw: &str) -> Token {
        Token::Text {
            text: decode_entities(raw),
            line: self.line_at(start),
        }
    }

    fn read_name(&mut self) -> String {
        let rest = self.rest();
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '/' || c == '>')
            .unwrap_or(rest.len());
        self.pos += len;
        rest[..len].to_ascii_lowercase()
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    fn end_tag(&mut self, start: usize) -> Token {
        self.pos += 2;
        let name = self.read_name();
        match self.rest().find('>') {
            Some(end) => self.pos += end + 1,
            None => {
                self.diag(format!("end of file inside </{name}> tag"), start);
                self.pos = self.src.len();
            }
        }
        Token::End {
            name,
            line: self.line_at(start),
        }
    }

    fn start_tag(&mut self, start: usize) -> Token {
        self.pos += 1;
        let name = self.read_name();
        let mut attrs: Vec<(String, String)> = Vec::new();
        let mut self_closing = false;
        loop {
            self.skip_ws();
            let rest = self.rest();
            if rest.is_empty() {
                self.diag(format!("end of file inside <{name}> tag"), start);
                break;
            }
            if rest.starts_with('>') {
                self.pos += 1;
                break;
            }
            if rest.starts_with("/>") {
                self.pos += 2;
                self_closing = true;
                break;
            }
            if rest.starts_with('/') {
                self.pos += 1;
                continue;
            }
            let len = rest
                .find(|c: char| c.is_whitespace() || c == '/' || c == '>' || c == '=')
                .unwrap_or(rest.len())
                .max(rest.chars().next().map_or(1, char::len_utf8));
            let attr_name = rest[..len].to_ascii_lowercase();
            self.pos += len;
            self.skip_ws();
            let mut value = String::new();
            if self.rest().starts_with('=') {
                self.pos += 1;
                self.skip_ws();
                value = self.attr_value(start, &name);
            }
            if attrs.iter().any(|(k, _)| *k == attr_name) {
                self.diag(
                    format!("duplicate attribute \"{attr_name}\" on <{name}>"),
                    start,
                );
            } else {
                attrs.push((attr_name, value));
            }
        }
        let line = self.line_at(start);
        if RAW_TEXT.contains(&name.as_str()) && !self_closing {
            self.raw_text(&name, start, line);
        }
        Token::Start {
            name,
            attrs,
            self_closing,
            line,
        }
    }

    fn attr_value(&mut self, tag_start: usize, tag: &str) -> String {
        let rest = self.rest();
        match rest.chars().next() {
            Some(q @ ('"' | '\'')) => match rest[1..].find(q) {
                Some(end) => {
                    self.pos += end + 2;
                    decode_entities(&rest[1..end + 1])
                }
                None => {
                    self.diag(format!("unterminated attribute value in <{tag}>"), tag_start);
                    self.pos = self.src.len();
                    decode_entities(&rest[1..])
                }
            },
            _ => {
                let len = rest
                    .find(|c: char| c.is_whitespace() || c == '>')
                    .unwrap_or(rest.len());
                self.pos += len;
                decode_entities(&rest[..len])
            }
        }
    }

    /// Consume raw text up to the matching end tag and queue it as a text token.
    fn raw_text(&mut self, name: &str, tag_start: usize, line: u32) {
        let rest = self.rest();
        let needle = format!("</{name}");
        let lower = rest.to_ascii_lowercase();
        let end = lower.match_indices(&needle).map(|(i, _)| i).find(|&i| {
            rest[i + needle.len()..]
                .chars()
                .next()
                .is_none_or(|c| c.is_whitespace() || c == '>' || c == '/')
        });
        let content_start = self.pos;
        let content = match end {
            Some(i) => {
                self.pos += i;
                &rest[..i]
            }
            None => {
                self.diag(format!("unclosed <{name}>"), tag_start);
                self.pos = self.src.len();
                rest
            }
        };
        if !content.is_empty() {
            let text = if matches!(name, "textarea" | "title") {
                decode_entities(content)
            } else {
                content.to_string()
            };
            self.pending = Some(Token::Text {
                text,
                line: self.line_at(content_start).max(line),
            });
        }
    }
}

struct Builder {
    stack: Vec<ContentNode>,
    fragment: bool,
    diagnostics: Vec<ParseDiagnostic>,
}

impl Builder {
    fn names(&self) -> impl DoubleEndedIterator<Item = (usize, &str)> {
        self.stack
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, n)| (i, n.element.as_str()))
    }

    fn pop_one(&mut self, report: Option<&str>) {
        let node = self.stack.pop().expect("non-empty stack");
        if let Some(closer) = report {
            if !OPTIONAL_END.contains(&node.element.as_str()) {
                let message = if closer.is_empty() {
                    format!("unclosed <{}>", node.element)
                } else {
                    format!("unclosed <{}> implicitly closed by {closer}", node.element)
                };
                self.diagnostics.push(ParseDiagnostic {
                    message,
                    source_line: node.source_line,
                });
            }
        }
        self.stack.last_mut().expect("root").children.push(node);
    }

    /// Close the open element at stack index `i`, reporting any elements
    /// above it that needed an explicit end tag.
    fn close(&mut self, i: usize, closer: &str) {
        while self.stack.len() > i + 1 {
            self.pop_one(Some(closer));
        }
        if self.stack.len() > 1 && self.stack.len() == i + 1 {
            self.pop_one(None);
        }
    }

    fn close_all(&mut self) {
        while self.stack.len() > 1 {
            self.pop_one(Some(""));
        }
    }

    /// Index of the nearest open `target` that is not hidden behind a boundary.
    fn find_open(&self, target: impl Fn(&str) -> bool, boundary: &[&str]) -> Option<usize> {
        for (i, name) in self.names().rev() {
            if target(name) {
                return Some(i);
            }
            if boundary.contains(&name) {
                return None;
            }
        }
        None
    }

    fn close_implied(&mut self, name: &str) {
        if CLOSES_P.contains(&name) {
            if let Some(i) = self.find_open(|n| n == "p", P_SCOPE_BOUNDARY) {
                self.close(i, &format!("<{name}>"));
            }
        }
        let found = match name {
            "li" => self.find_open(|n| n == "li", &["ul", "ol", "menu", "table", "body"]),
            "dt" | "dd" => self.find_open(|n| n == "dt" || n == "dd", &["dl", "table", "body"]),
            "td" | "th" => self.find_open(|n| n == "td" || n == "th", &["tr", "table"]),
            "tr" => self.find_open(|n| n == "tr", &["table", "thead", "tbody", "tfoot"]),
            "thead" | "tbody" | "tfoot" => {
                self.find_open(|n| matches!(n, "thead" | "tbody" | "tfoot"), &["table"])
            }
            "option" => self.find_open(|n| n == "option", &["select", "datalist", "optgroup"]),
            "optgroup" => self.find_open(|n| n == "optgroup" || n == "option", &["select"]),
            _ => None,
        };
        if let Some(i) = found {
            self.close(i, &format!("<{name}>"));
        }
        if name == "tr" {
            // a row directly after cells of a previous row
            if let Some(i) = self.find_open(|n| n == "td" || n == "th", &["table"]) {
                self.close(i, "");
            }
        }
        if is_heading(name) {
            if let Some((i, top)) = self.names().last() {
                if is_heading(top) {
                    self.diagnostics.push(ParseDiagnostic {
                        message: format!("<{name}> nested inside <{top}>"),
                        source_line: self.stack[i].source_line,
                    });
                    self.close(i, "");
                }
            }
        }
        if name == "a" {
            if let Some(i) = self.find_open(|n| n == "a", &[]) {
                self.diagnostics.push(ParseDiagnostic {
                    message: "nested <a>".into(),
                    source_line: self.stack[i].source_line,
                });
                self.close(i, "<a>");
            }
        }
    }

    fn start(&mut self, name: String, attrs: Vec<(String, String)>, self_closing: bool, line: u32) {
        if matches!(name.as_str(), "html" | "head" | "body") {
            if self.fragment {
                return;
            }
            if let Some(i) = self.find_open(|n| n == name, &[]) {
                let open = &mut self.stack[i];
                for (k, v) in attrs {
                    if !open.has_attr(&k) {
                        open.attributes.push((k, v));
                    }
                }
                return;
            }
            if name == "body" {
                if let Some(i) = self.find_open(|n| n == "head", &[]) {
                    self.close(i, "");
                }
            }
        }
        self.close_implied(&name);
        let mut node = ContentNode::element(name, Some(line));
        node.attributes = attrs;
        if VOID.contains(&node.element.as_str()) || self_closing {
            self.stack.last_mut().expect("root").children.push(node);
        } else {
            self.stack.push(node);
        }
    }

    fn end(&mut self, name: String, line: u32) {
        if VOID.contains(&name.as_str()) {
            if name != "br" {
                self.stray(&name, line);
            }
            return;
        }
        if self.fragment && matches!(name.as_str(), "html" | "head" | "body") {
            return;
        }
        match self.find_open(|n| n == name, &[]) {
            Some(i) => self.close(i, &format!("</{name}>")),
            None => self.stray(&name, line),
        }
    }

    fn stray(&mut self, name: &str, line: u32) {
        self.diagnostics.push(ParseDiagnostic {
            message: format!("stray end tag </{name}>"),
            source_line: Some(line),
        });
    }

    fn text(&mut self, text: String, line: u32) {
        let parent = self.stack.last_mut().expect("root");
        if let Some(last) = parent.children.last_mut() {
            if let Some(t) = last.text.as_mut() {
                t.push_str(&text);
                return;
            }
        }
        parent.children.push(ContentNode::text(text, Some(line)));
    }
}

fn build(src: &str, line_offset: u32, fragment: bool) -> (ContentNode, Vec<ParseDiagnostic>) {
    let mut tokenizer = Tokenizer::new(src, line_offset);
    let mut builder = Builder {
        stack: vec![ContentNode::root()],
        fragment,
        diagnostics: Vec::new(),
    };
    while let Some(token) = tokenizer.next_token() {
        match token {
            Token::Start {
                name,
                attrs,
                self_closing,
                line,
            } => builder.start(name, attrs, self_closing, line),
            Token::End { name, line } => builder.end(name, line),
            Token::Text { text, line } => builder.text(text, line),
        }
    }
    builder.close_all();
    let root = builder.stack.pop().expect("root");
    let mut diagnostics = tokenizer.diagnostics;
    diagnostics.extend(builder.diagnostics);
    diagnostics.sort_by_key(|d| d.source_line);
    (root, diagnostics)
}

/// Rearrange a parsed tree into `#root > html > (head, body)`.
fn normalize_document(root: ContentNode) -> ContentNode {
    debug_assert_eq!(root.element, ROOT);
    let mut html = ContentNode::element("html", None);
    let mut head = ContentNode::element("head", None);
    let mut body = ContentNode::element("body", None);
    let mut body_started = false;

    fn place(
        node: ContentNode,
        head: &mut ContentNode,
        body: &mut ContentNode,
        body_started: &mut bool,
    ) {
        if node.is_text() && node.text.as_deref().is_some_and(|t| t.trim().is_empty()) {
            if *body_started {
                body.children.push(node);
            }
            return;
        }
        if !*body_started && HEAD_ELEMENTS.contains(&node.element.as_str()) {
            head.children.push(node);
        } else {
            *body_started = true;
            body.children.push(node);
        }
    }

    fn absorb(
        node: ContentNode,
        html: &mut ContentNode,
        head: &mut ContentNode,
        body: &mut ContentNode,
        body_started: &mut bool,
    ) {
        match node.element.as_str() {
            "html" => {
                html.attributes = node.attributes;
                html.source_line = node.source_line;
                for c in node.children {
                    absorb(c, html, head, body, body_started);
                }
            }
            "head" => {
                head.attributes = node.attributes;
                head.source_line = node.source_line;
                head.children.extend(node.children);
            }
            "body" => {
                body.attributes = node.attributes;
                body.source_line = node.source_line;
                *body_started = true;
                body.children.extend(node.children);
            }
            _ => place(node, head, body, body_started),
        }
    }

    for child in root.children {
        absorb(child, &mut html, &mut head, &mut body, &mut body_started);
    }
    html.children = vec![head, body];
    let mut out = ContentNode::root();
    out.children.push(html);
    out
}

/// Drop whitespace-only text nodes outside preformatted content.
fn strip_whitespace(node: &mut ContentNode, preformatted: bool) {
    let pre = preformatted || matches!(node.element.as_str(), "pre" | "textarea");
    if !pre {
        node.children
            .retain(|c| !c.text.as_deref().is_some_and(|t| t.trim().is_empty()));
    }
    for c in &mut node.children {
        strip_whitespace(c, pre);
    }
}

const NAMED_ENTITIES: &[(&str, &str)] = &[
    ("amp", "&"),
    ("lt", "<"),
    ("gt", ">"),
    ("quot", "\""),
    ("apos", "'"),
    ("nbsp", "\u{a0}"),
    ("copy", "©"),
    ("reg", "®"),
    ("trade", "™"),
    ("mdash", "—"),
    ("ndash", "–"),
    ("hellip", "…"),
    ("lsquo", "‘"),
    ("rsquo", "’"),
    ("ldquo", "“"),
    ("rdquo", "”"),
    ("laquo", "«"),
    ("raquo", "»"),
    ("bull", "•"),
    ("middot", "·"),
    ("times", "×"),
    ("divide", "÷"),
    ("larr", "←"),
    ("rarr", "→"),
    ("uarr", "↑"),
    ("darr", "↓"),
    ("harr", "↔"),
    ("lArr", "⇐"),
    ("rArr", "⇒"),
    ("le", "≤"),
    ("ge", "≥"),
    ("ne", "≠"),
    ("plusmn", "±"),
    ("deg", "°"),
    ("para", "¶"),
    ("sect", "§"),
    ("cent", "¢"),
    ("pound", "£"),
    ("euro", "€"),
    ("yen", "¥"),
    ("micro", "µ"),
    ("frac12", "½"),
    ("frac14", "¼"),
    ("frac34", "¾"),
    ("sup2", "²"),
    ("sup3", "³"),
    ("shy", "\u{ad}"),
    ("ensp", "\u{2002}"),
    ("emsp", "\u{2003}"),
    ("thinsp", "\u{2009}"),
    ("zwnj", "\u{200c}"),
    ("zwj", "\u{200d}"),
    ("check", "✓"),
    ("infin", "∞"),
    ("sum", "∑"),
    ("lambda", "λ"),
    ("theta", "θ"),
    ("pi", "π"),
];

/// Decode character references. Unknown names are left as written.
pub fn decode_entities(raw: &str) -> String {
    if !raw.contains('&') {
        return raw.to_string();
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest[1..].find(';').filter(|&i| i <= 32).and_then(|semi| {
            let name = &rest[1..semi + 1];
            let ch = if let Some(num) = name.strip_prefix('#') {
                let code = match num.strip_prefix(['x', 'X']) {
                    Some(hex) => u32::from_str_radix(hex, 16).ok(),
                    None => num.parse::<u32>().ok(),
                };
                code.map(|c| char::from_u32(c).unwrap_or('\u{fffd}').to_string())
            } else {
                NAMED_ENTITIES
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, v)| v.to_string())
            };
            ch.map(|c| (c, semi + 2))
        });
        match decoded {
            Some((text, len)) => {
                out.push_str(&text);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::MediaKind;

    fn parse(src: &str) -> Document {
        let file = SourceFile::from_bytes("t.html", MediaKind::Html, src.as_bytes());
        parse_html(file, src.as_bytes()).unwrap()
    }

    fn elements<'a>(doc: &'a Document, name: &str) -> Vec<&'a ContentNode> {
        doc.root.descendants().filter(|n| n.is(name)).collect()
    }

    #[test]
    fn simple_document() {
        let doc = parse(r#"<html lang="en"><body><h1>Hi</h1></body></html>"#);
        assert_eq!(doc.lang.as_deref(), Some("en"));
        let h1 = elements(&doc, "h1");
        assert_eq!(h1.len(), 1);
        assert_eq!(h1[0].normalized_text(), "Hi");
        assert_eq!(h1[0].structural_path, "/html/body/h1[1]");
        assert!(doc.parse_diagnostics.is_empty(), "{:?}", doc.parse_diagnostics);
    }

    #[test]
    fn unclosed_inline_is_diagnosed() {
        let doc = parse("<p><b>unclosed");
        assert!(!doc.parse_diagnostics.is_empty());
        assert!(doc.parse_diagnostics[0].message.contains("<b>"));
        assert_eq!(doc.parse_diagnostics[0].source_line, Some(1));
    }

    #[test]
    fn absent_alt_is_not_empty_alt() {
        let doc = parse(r#"<img src="x.png"><img src="y.png" alt="">"#);
        let imgs = elements(&doc, "img");
        assert_eq!(imgs[0].attr("alt"), None);
        assert_eq!(imgs[1].attr("alt"), Some(""));
        assert_eq!(imgs[0].structural_path, "/html/body/img[1]");
    }

    #[test]
    fn duplicate_attribute_first_wins() {
        let doc = parse(r#"<p class="a" class="b">x</p>"#);
        assert_eq!(elements(&doc, "p")[0].attr("class"), Some("a"));
        assert_eq!(doc.parse_diagnostics.len(), 1);
        assert!(doc.parse_diagnostics[0].message.contains("duplicate attribute"));
    }

    #[test]
    fn implied_end_tags_are_silent() {
        let src = "<!DOCTYPE html><html lang=en><head><title>T</title></head><body>\n\
                   <p>one<p>two\n<ul><li>a<li>b</ul>\n\
                   <table><tr><th>h<th>i<tr><td>1<td>2</table></body></html>";
        let doc = parse(src);
        assert!(doc.parse_diagnostics.is_empty(), "{:?}", doc.parse_diagnostics);
        assert_eq!(elements(&doc, "p").len(), 2);
        assert_eq!(elements(&doc, "li").len(), 2);
        assert_eq!(elements(&doc, "tr").len(), 2);
        assert_eq!(elements(&doc, "td").len(), 2);
        assert_eq!(doc.title.as_deref(), Some("T"));
        let li = elements(&doc, "li");
        assert_eq!(li[1].structural_path, "/html/body/ul[1]/li[2]");
    }

    #[test]
    fn misnested_end_tag_reports_inner_element() {
        let doc = parse("<div><em>x</div>");
        assert_eq!(doc.parse_diagnostics.len(), 1);
        assert!(doc.parse_diagnostics[0].message.contains("unclosed <em>"));
    }

    #[test]
    fn stray_end_tag() {
        let doc = parse("<p>x</p></span>");
        assert_eq!(doc.parse_diagnostics.len(), 1);
        assert!(doc.parse_diagnostics[0].message.contains("stray"));
    }

    #[test]
    fn raw_text_is_not_markup() {
        let doc = parse("<script>if (a < b && c) { x = '<p>'; }</script><p>ok</p>");
        assert_eq!(elements(&doc, "p").len(), 1);
        let script = elements(&doc, "script")[0];
        assert!(script.text_content().contains("'<p>'"));
        assert!(doc.parse_diagnostics.is_empty());
    }

    #[test]
    fn entities_decode() {
        assert_eq!(decode_entities("a &amp; b &lt;c&gt; &#65;&#x42; &bogus; &"), "a & b <c> AB &bogus; &");
        let doc = parse("<p>Tom&nbsp;&amp;&nbsp;Jerry</p>");
        assert_eq!(elements(&doc, "p")[0].text_content(), "Tom\u{a0}&\u{a0}Jerry");
    }

    #[test]
    fn line_numbers_follow_source() {
        let doc = parse("<html>\n<body>\n<h1>a</h1>\n\n<p>\nb</p></body></html>");
        assert_eq!(elements(&doc, "h1")[0].source_line, Some(3));
        assert_eq!(elements(&doc, "p")[0].source_line, Some(5));
    }

    #[test]
    fn fragment_gets_synthesized_wrappers() {
        let doc = parse("<title>x</title><main><p>hi</p></main>");
        let head = doc.node("/html/head").unwrap();
        assert_eq!(head.children[0].element, "title");
        assert!(doc.node("/html/body/main[1]/p[1]").is_some());
    }

    #[test]
    fn whitespace_kept_in_pre() {
        let doc = parse("<pre>\n  a\n  <b> </b>\n</pre>");
        let pre = elements(&doc, "pre")[0];
        assert_eq!(pre.text_content(), "\n  a\n   \n");
    }

    #[test]
    fn unquoted_and_valueless_attributes() {
        let doc = parse("<video src=v.mp4 controls><track kind=captions src=c.vtt></video>");
        let v = elements(&doc, "video")[0];
        assert_eq!(v.attr("src"), Some("v.mp4"));
        assert_eq!(v.attr("controls"), Some(""));
        assert_eq!(v.children[0].attr("kind"), Some("captions"));
    }

    #[test]
    fn fragment_lines_are_offset() {
        let (nodes, diags) = parse_fragment("<div>\n<b>x\n</div>", 10);
        assert_eq!(nodes[0].source_line, Some(10));
        assert_eq!(diags[0].source_line, Some(11));
    }

    #[test]
    fn never_panics_on_garbage() {
        for src in ["<", "</", "<a", "<a b='", "<!--", "<p <p>", "&#xZZ;", "<<>>", "</ >", "<a\u{e9}>"] {
            let _ = parse(src);
        }
    }
}
