//! CommonMark (+ tables) into the shared [`ContentNode`] model.
//!
//! The element vocabulary matches what a Markdown renderer would emit as
//! HTML so the same rules apply to both. Raw HTML blocks are parsed with the
//! HTML fragment parser and grafted in place.

use pulldown_cmark::{CodeBlockKind, Event, HeadingLevel, Options, Parser, Tag, TagEnd};

use super::html::parse_fragment;
use super::node::{ContentNode, Document, ParseDiagnostic};
use super::{decode_utf8, SourceFile};
use crate::error::Result;

struct ImageFrame {
    src: String,
    title: String,
    alt: String,
    line: u32,
    depth: usize,
}

struct Builder {
    stack: Vec<ContentNode>,
    image: Option<ImageFrame>,
    html_block: Option<(String, u32)>,
    skip_depth: usize,
    in_table_head: bool,
    tbody_open: bool,
    diagnostics: Vec<ParseDiagnostic>,
}

impl Builder {
    fn push(&mut self, name: &str, line: u32) -> &mut ContentNode {
        self.stack.push(ContentNode::element(name, Some(line)));
        self.stack.last_mut().expect("just pushed")
    }

    fn pop(&mut self) {
        if self.stack.len() > 1 {
            let node = self.stack.pop().expect("len > 1");
            self.append(node);
        }
    }

    fn append(&mut self, node: ContentNode) {
        self.stack.last_mut().expect("root").children.push(node);
    }

    fn text(&mut self, text: &str, line: u32) {
        let parent = self.stack.last_mut().expect("root");
        if let Some(t) = parent.children.last_mut().and_then(|n| n.text.as_mut()) {
            t.push_str(text);
        } else {
            parent.children.push(ContentNode::text(text, Some(line)));
        }
    }

    fn start(&mut self, tag: Tag<'_>, line: u32) {
        if let Some(img) = self.image.as_mut() {
            img.depth += 1;
            return;
        }
        match tag {
            Tag::Paragraph => {
                self.push("p", line);
            }
            Tag::Heading { level, .. } => {
                let n = match level {
                    HeadingLevel::H1 => 1,
                    HeadingLevel::H2 => 2,
                    HeadingLevel::H3 => 3,
                    HeadingLevel::H4 => 4,
                    HeadingLevel::H5 => 5,
                    HeadingLevel::H6 => 6,
                };
                self.push(&format!("h{n}"), line);
            }
            Tag::BlockQuote(_) => {
                self.push("blockquote", line);
            }
            Tag::CodeBlock(kind) => {
                self.push("pre", line);
                let code = self.push("code", line);
                if let CodeBlockKind::Fenced(info) = kind {
                    if let Some(lang) = info.split_whitespace().next() {
                        code.set_attr("class", format!("language-{lang}"));
                    }
                }
            }
            Tag::HtmlBlock => self.html_block = Some((String::new(), line)),
            Tag::List(Some(start)) => {
                let ol = self.push("ol", line);
                if start != 1 {
                    ol.set_attr("start", start.to_string());
                }
            }
            Tag::List(None) => {
                self.push("ul", line);
            }
            Tag::Item => {
                self.push("li", line);
            }
            Tag::Table(_) => {
                self.tbody_open = false;
                self.push("table", line);
            }
            Tag::TableHead => {
                self.in_table_head = true;
                self.push("thead", line);
                self.push("tr", line);
            }
            Tag::TableRow => {
                if !self.tbody_open {
                    self.tbody_open = true;
                    self.push("tbody", line);
                }
                self.push("tr", line);
            }
            Tag::TableCell => {
                let cell = if self.in_table_head { "th" } else { "td" };
                self.push(cell, line);
            }
            Tag::Emphasis => {
                self.push("em", line);
            }
            Tag::Strong => {
                self.push("strong", line);
            }
            Tag::Strikethrough => {
                self.push("del", line);
            }
            Tag::Link {
                dest_url, title, ..
            } => {
                let a = self.push("a", line);
                a.set_attr("href", dest_url.to_string());
                if !title.is_empty() {
                    a.set_attr("title", title.to_string());
                }
            }
            Tag::Image {
                dest_url, title, ..
            } => {
                self.image = Some(ImageFrame {
                    src: dest_url.to_string(),
                    title: title.to_string(),
                    alt: String::new(),
                    line,
                    depth: 0,
                });
            }
            Tag::MetadataBlock(_) => self.skip_depth = 1,
            _ => {
                self.push("div", line);
            }
        }
    }

    fn end(&mut self, tag: TagEnd) {
        if let Some(img) = self.image.as_mut() {
            if img.depth > 0 {
                img.depth -= 1;
                return;
            }
            let img = self.image.take().expect("checked");
            let mut node = ContentNode::element("img", Some(img.line));
            node.set_attr("src", img.src);
            node.set_attr("alt", img.alt);
            if !img.title.is_empty() {
                node.set_attr("title", img.title);
            }
            self.append(node);
            return;
        }
        match tag {
            TagEnd::HtmlBlock => {
                if let Some((src, line)) = self.html_block.take() {
                    let (nodes, diags) = parse_fragment(&src, line);
                    for n in nodes {
                        self.append(n);
                    }
                    self.diagnostics.extend(diags);
                }
            }
            TagEnd::CodeBlock => {
                self.pop();
                self.pop();
            }
            TagEnd::TableHead => {
                self.in_table_head = false;
                self.pop();
                self.pop();
            }
            TagEnd::Table => {
                if self.tbody_open {
                    self.pop();
                    self.tbody_open = false;
                }
                self.pop();
            }
            _ => self.pop(),
        }
    }

    fn event(&mut self, event: Event<'_>, line: u32) {
        if self.skip_depth > 0 {
            match event {
                Event::Start(_) => self.skip_depth += 1,
                Event::End(_) => self.skip_depth -= 1,
                _ => {}
            }
            return;
        }
        match event {
            Event::Start(tag) => self.start(tag, line),
            Event::End(tag) => self.end(tag),
            Event::Text(t) | Event::Code(t) if self.image.is_some() => {
                self.image.as_mut().expect("checked").alt.push_str(&t);
            }
            Event::Text(t) => self.text(&t, line),
            Event::Code(t) => {
                let mut code = ContentNode::element("code", Some(line));
                code.children.push(ContentNode::text(t.to_string(), Some(line)));
                self.append(code);
            }
            Event::Html(t) => match self.html_block.as_mut() {
                Some((buf, _)) => buf.push_str(&t),
                None => self.inline_html(&t, line),
            },
            Event::InlineHtml(t) => self.inline_html(&t, line),
            Event::SoftBreak => {
                if let Some(img) = self.image.as_mut() {
                    img.alt.push(' ');
                } else {
                    self.text("\n", line);
                }
            }
            Event::HardBreak => self.append(ContentNode::element("br", Some(line))),
            Event::Rule => self.append(ContentNode::element("hr", Some(line))),
            Event::InlineMath(t) | Event::DisplayMath(t) => self.text(&t, line),
            Event::FootnoteReference(_) | Event::TaskListMarker(_) => {}
        }
    }

    /// Inline tags arrive one at a time; only self-contained ones (e.g.
    /// `<img ...>`, `<br>`) can be grafted without a diagnostic.
    fn inline_html(&mut self, src: &str, line: u32) {
        let (nodes, diags) = parse_fragment(src, line);
        if diags.is_empty() {
            for n in nodes {
                self.append(n);
            }
        }
    }
}

pub fn parse_markdown(file: SourceFile, bytes: &[u8]) -> Result<Document> {
    let src = decode_utf8(&file, bytes)?;
    let mut line_starts = vec![0usize];
    line_starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
    let line_at = |pos: usize| line_starts.partition_point(|&s| s <= pos) as u32;

    let options = Options::ENABLE_TABLES
        | Options::ENABLE_STRIKETHROUGH
        | Options::ENABLE_YAML_STYLE_METADATA_BLOCKS;
    let mut builder = Builder {
        stack: vec![ContentNode::root()],
        image: None,
        html_block: None,
        skip_depth: 0,
        in_table_head: false,
        tbody_open: false,
        diagnostics: Vec::new(),
    };
    for (event, range) in Parser::new_ext(src, options).into_offset_iter() {
        builder.event(event, line_at(range.start));
    }
    while builder.stack.len() > 1 {
        builder.pop();
    }
    let root = builder.stack.pop().expect("root");

    let mut doc = Document::new(file, root);
    doc.title = doc
        .root
        .descendants()
        .find(|n| n.is("h1"))
        .map(|h| h.normalized_text())
        .filter(|t| !t.is_empty());
    doc.parse_diagnostics = builder.diagnostics;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::MediaKind;

    fn parse(src: &str) -> Document {
        let file = SourceFile::from_bytes("t.md", MediaKind::Markdown, src.as_bytes());
        parse_markdown(file, src.as_bytes()).unwrap()
    }

    fn first<'a>(doc: &'a Document, name: &str) -> &'a ContentNode {
        doc.root.descendants().find(|n| n.is(name)).unwrap()
    }

    #[test]
    fn atx_heading() {
        let doc = parse("# Title\n");
        assert_eq!(doc.root.children.len(), 1);
        let h1 = first(&doc, "h1");
        assert_eq!(h1.normalized_text(), "Title");
        assert_eq!(h1.structural_path, "/h1[1]");
        assert_eq!(doc.title.as_deref(), Some("Title"));
    }

    #[test]
    fn setext_heading() {
        let doc = parse("Sub\n---\n");
        assert_eq!(first(&doc, "h2").normalized_text(), "Sub");
    }

    #[test]
    fn link() {
        let doc = parse("[click here](https://x.test)\n");
        let a = first(&doc, "a");
        assert_eq!(a.attr("href"), Some("https://x.test"));
        assert_eq!(a.normalized_text(), "click here");
    }

    // pulldown-cmark renders `![](x)` with alt="" (present but empty).
    #[test]
    fn empty_image_alt_is_present_and_empty() {
        let doc = parse("![](diagram.png)\n");
        let img = first(&doc, "img");
        assert_eq!(img.attr("src"), Some("diagram.png"));
        assert_eq!(img.attr("alt"), Some(""));
    }

    #[test]
    fn image_alt_flattens_inline_markup() {
        let doc = parse("![A *binary* `tree`](t.png \"T\")\n");
        let img = first(&doc, "img");
        assert_eq!(img.attr("alt"), Some("A binary tree"));
        assert_eq!(img.attr("title"), Some("T"));
        assert!(img.children.is_empty());
    }

    #[test]
    fn fenced_code() {
        let doc = parse("```java\nint x = 1;\n```\n");
        let pre = first(&doc, "pre");
        assert_eq!(pre.children[0].element, "code");
        assert_eq!(pre.children[0].attr("class"), Some("language-java"));
        assert_eq!(pre.text_content(), "int x = 1;\n");
    }

    #[test]
    fn table_shape() {
        let doc = parse("| a | b |\n|---|---|\n| 1 | 2 |\n| 3 | 4 |\n");
        let paths: Vec<_> = doc
            .root
            .descendants()
            .filter(|n| n.is_element())
            .map(|n| n.structural_path.as_str())
            .collect();
        assert!(paths.contains(&"/table[1]/thead[1]/tr[1]/th[2]"));
        assert!(paths.contains(&"/table[1]/tbody[1]/tr[2]/td[1]"));
    }

    #[test]
    fn html_block_is_grafted() {
        let doc = parse("Intro\n\n<video src=\"v.mp4\">\n<track kind=\"captions\" src=\"c.vtt\">\n</video>\n\nOutro\n");
        let video = first(&doc, "video");
        assert_eq!(video.source_line, Some(3));
        assert_eq!(video.children[0].attr("kind"), Some("captions"));
    }

    #[test]
    fn inline_img_tag_is_kept() {
        let doc = parse("See <img src=\"a.png\"> here\n");
        let img = first(&doc, "img");
        assert_eq!(img.attr("alt"), None);
    }

    #[test]
    fn front_matter_is_skipped() {
        let doc = parse("---\ntitle: x\n---\n\n# Real\n");
        assert_eq!(doc.root.children.len(), 1);
        assert_eq!(first(&doc, "h1").source_line, Some(5));
    }

    #[test]
    fn lists() {
        let doc = parse("3. a\n4. b\n\n- x\n");
        let ol = first(&doc, "ol");
        assert_eq!(ol.attr("start"), Some("3"));
        assert_eq!(ol.children.len(), 2);
        assert!(doc.root.descendants().any(|n| n.is("ul")));
    }
}
