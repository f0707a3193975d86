use std::collections::HashSet;

use super::{text_anchor, truncate_snippet, AnchorScope, Finding, Hit, Severity};
use crate::content::{ContentNode, Document};

fn is_main(node: &ContentNode) -> bool {
    node.is("main") || node.attr("role") == Some("main")
}

/// Rows of `table` itself, not of tables nested in its cells.
fn own_rows(table: &ContentNode) -> Vec<&ContentNode> {
    fn walk<'a>(node: &'a ContentNode, out: &mut Vec<&'a ContentNode>) {
        for child in &node.children {
            if child.is("tr") {
                out.push(child);
            } else if !child.is("table") {
                walk(child, out);
            }
        }
    }
    let mut rows = Vec::new();
    walk(table, &mut rows);
    rows
}

fn cells(row: &ContentNode) -> impl Iterator<Item = &ContentNode> {
    row.children.iter().filter(|c| c.is("td") || c.is("th"))
}

fn span(cell: &ContentNode) -> usize {
    cell.attr("colspan")
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(1)
}

/// HTML-only checks: `doc-lang`, `landmark-main`, `duplicate-id`,
/// `table-headers`, and `html-parse` for repairs the parser made.
pub fn check_document_validity(doc: &Document) -> Vec<Finding> {
    let mut hits = Vec::new();
    let html = doc.node("/html").unwrap_or(&doc.root);
    if doc.lang.is_none() {
        hits.push(Hit {
            rule_id: "doc-lang",
            severity: Severity::Error,
            node: html,
            scope: AnchorScope::Tag,
            message: "<html> has no lang attribute".into(),
            fix_hint: "Declare the page language, e.g. <html lang=\"en\">.".into(),
        });
    }

    let mains: Vec<&ContentNode> = doc.root.descendants().filter(|n| is_main(n)).collect();
    if mains.is_empty() {
        hits.push(Hit {
            rule_id: "landmark-main",
            severity: Severity::Error,
            node: doc.node("/html/body").unwrap_or(html),
            scope: AnchorScope::Tag,
            message: "page has no main landmark".into(),
            fix_hint: "Wrap the primary content in <main>.".into(),
        });
    }
    for extra in mains.iter().skip(1) {
        hits.push(Hit {
            rule_id: "landmark-main",
            severity: Severity::Error,
            node: extra,
            scope: AnchorScope::Content,
            message: format!("page has {} main landmarks", mains.len()),
            fix_hint: "Keep exactly one main landmark.".into(),
        });
    }

    let mut ids = HashSet::new();
    for node in doc.root.descendants() {
        let Some(id) = node.attr("id") else { continue };
        if !ids.insert(id) {
            hits.push(Hit {
                rule_id: "duplicate-id",
                severity: Severity::Error,
                node,
                scope: AnchorScope::Content,
                message: format!("id \"{id}\" is already used earlier in the page"),
                fix_hint: "Give each element a unique id.".into(),
            });
        }
    }

    for table in doc.root.descendants().filter(|n| n.is("table")) {
        if matches!(table.attr("role"), Some("presentation" | "none")) {
            continue;
        }
        let rows = own_rows(table);
        let columns = rows.iter().map(|r| cells(r).map(span).sum::<usize>()).max().unwrap_or(0);
        let has_th = rows.iter().any(|r| cells(r).any(|c| c.is("th")));
        if rows.len() > 1 && columns > 1 && !has_th {
            hits.push(Hit {
                rule_id: "table-headers",
                severity: Severity::Error,
                node: table,
                scope: AnchorScope::Content,
                message: format!("{}x{columns} table has no header cells", rows.len()),
                fix_hint: "Mark the header row or column with <th>.".into(),
            });
        }
    }

    let mut out: Vec<Finding> = hits.into_iter().map(|h| h.into_finding(doc)).collect();
    for diag in &doc.parse_diagnostics {
        out.push(Finding {
            rule_id: "html-parse".into(),
            severity: Severity::Warning,
            file_path: doc.file.path.clone(),
            locator: "/".into(),
            source_line: diag.source_line,
            snippet: truncate_snippet(&diag.message),
            message: diag.message.clone(),
            fix_hint: "Fix the markup so browsers and assistive technology agree on the structure.".into(),
            machine_decidable: true,
            element: "html".into(),
            src: None,
            anchor: text_anchor(&["html-parse", &diag.message]),
        });
    }
    out
}
