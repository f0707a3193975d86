use std::collections::BTreeSet;

use a11y_audit::config::{Config, FailOn, RuleConfig};
use a11y_audit::content::html::parse_html;
use a11y_audit::content::markdown::parse_markdown;
use a11y_audit::content::style::resolve_styles;
use a11y_audit::content::{BBox, Document, ElementKind, MediaKind, Rgb, Slide, SlideElement, SourceFile};
use a11y_audit::report::render_csv;
use a11y_audit::rules::{catalog, contrast_ratio, geometric_order, run_rules, Finding, Severity};
use a11y_audit::snapshot::{apply_baseline, diff, AuditSnapshot, Baseline};
use a11y_audit::taxonomy::{apply_annotations, build_issues, Annotation, AnnotationOverlay, Necessity, Status};
use proptest::prelude::*;

const FRAGMENTS: &[&str] = &[
    "<h1>Title</h1>",
    "<h2>Part</h2>",
    "<h4>Deep</h4>",
    "<p>Plain prose about loops.</p>",
    "<p>See the figure above for details.</p>",
    r#"<p><a href="/a">click here</a></p>"#,
    r#"<p><a href="/b">Syllabus</a></p>"#,
    r#"<p><a href="https://x.test/y">https://x.test/y</a></p>"#,
    r#"<img src="a.png">"#,
    r#"<img src="b.png" alt="b.png">"#,
    r#"<img src="code-screenshot.png" alt="code">"#,
    r#"<img src="c.png" alt="A tree with three nodes">"#,
    r#"<p style="color:#777">grey</p>"#,
    r#"<p style="color:#000;background:#fff">dark</p>"#,
    "<video src=\"v.mp4\"></video>",
    "<table><tr><td>a</td><td>b</td></tr><tr><td>c</td><td>d</td></tr></table>",
    r#"<p id="x">one</p>"#,
    "<pre>+---+\n|   |\n+---+\n|   |\n+---+</pre>",
    "<p>Unclosed <b>bold</p>",
];

fn file(path: &str, kind: MediaKind, body: &str) -> SourceFile {
    SourceFile::from_bytes(path, kind, body.as_bytes())
}

fn html_doc(path: &str, body: &str) -> Document {
    let src = format!("<!DOCTYPE html><html lang=\"en\"><head><title>t</title></head><body><main>{body}</main></body></html>");
    let doc = parse_html(file(path, MediaKind::Html, &src), src.as_bytes()).unwrap();
    resolve_styles(doc, None).0
}

fn page_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(FRAGMENTS), 0..12).prop_map(|f| f.concat())
}

fn corpus_strategy() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec(page_strategy(), 1..4).prop_map(|pages| {
        pages
            .iter()
            .enumerate()
            .map(|(n, body)| html_doc(&format!("p{n}.html"), body))
            .collect()
    })
}

fn finding(rule: &str, file: &str, anchor: &str) -> Finding {
    let severity = a11y_audit::rules::rule_info(rule).unwrap().default_severity;
    Finding {
        rule_id: rule.into(),
        severity,
        file_path: file.into(),
        locator: format!("/html/body/x[{}]", anchor.len()),
        source_line: None,
        snippet: String::new(),
        message: format!("message {anchor}"),
        fix_hint: "hint".into(),
        machine_decidable: severity != Severity::NeedsHumanReview,
        element: "x".into(),
        src: None,
        anchor: anchor.into(),
    }
}

fn findings_strategy() -> impl Strategy<Value = Vec<Finding>> {
    let rules = prop::sample::select(vec!["alt-missing", "link-text", "visual-language", "alt-length"]);
    let files = prop::sample::select(vec!["a.html", "b/c.md", "slides/lecture07.slides.json"]);
    prop::collection::vec((rules, files, "[a-d]{1,3}"), 0..30)
        .prop_map(|v| v.into_iter().map(|(r, f, a)| finding(r, f, &a)).collect())
}

fn snapshot_of(findings: Vec<Finding>) -> AuditSnapshot {
    AuditSnapshot::new(
        build_issues(findings, &Config::default()).unwrap(),
        vec![],
        &Config::default(),
        "2026-01-01T00:00:00Z".into(),
    )
}

fn fingerprints(s: &AuditSnapshot) -> BTreeSet<String> {
    s.issues.iter().map(|i| i.fingerprint.clone()).collect()
}

fn rgb() -> impl Strategy<Value = Rgb> {
    any::<(u8, u8, u8)>().prop_map(|(r, g, b)| Rgb(r, g, b))
}

proptest! {
    #[test]
    fn contrast_symmetric_and_bounded(a in rgb(), b in rgb()) {
        let r = contrast_ratio(a, b);
        prop_assert_eq!(r, contrast_ratio(b, a));
        prop_assert!((1.0..=21.0).contains(&r));
        prop_assert!((contrast_ratio(a, a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn darker_grey_never_lowers_contrast_on_white(g1 in any::<u8>(), g2 in any::<u8>()) {
        let (dark, light) = (g1.min(g2), g1.max(g2));
        prop_assert!(contrast_ratio(Rgb(dark, dark, dark), Rgb::WHITE) >= contrast_ratio(Rgb(light, light, light), Rgb::WHITE));
    }

    #[test]
    fn parsers_never_panic(src in "\\PC{0,300}") {
        let _ = parse_html(file("x.html", MediaKind::Html, &src), src.as_bytes());
        let _ = parse_markdown(file("x.md", MediaKind::Markdown, &src), src.as_bytes());
    }

    #[test]
    fn html_soup_parses_and_styles_cover_real_nodes(parts in prop::collection::vec(
        prop::sample::select(vec!["<div>", "</div>", "<p>", "</p>", "<b>", "</i>", "text", "<img src=a.png>", "<!-- c", "<table><tr><td>", "&amp;", "<span style=\"color:red\">"]),
        0..40,
    )) {
        let src = parts.concat();
        let doc = parse_html(file("x.html", MediaKind::Html, &src), src.as_bytes()).unwrap();
        let doc = resolve_styles(doc, None).0;
        for path in doc.styles.keys() {
            prop_assert!(doc.node(path).is_some(), "style for missing node {}", path);
        }
    }

    #[test]
    fn rule_engine_is_deterministic_and_coherent(docs in corpus_strategy()) {
        let config = Config::default();
        let a = run_rules(&docs, &[], &config);
        let reversed: Vec<Document> = docs.iter().rev().cloned().collect();
        prop_assert_eq!(&a, &run_rules(&reversed, &[], &config));
        for f in &a {
            let info = a11y_audit::rules::rule_info(&f.rule_id).unwrap();
            prop_assert_eq!(f.machine_decidable, f.severity != Severity::NeedsHumanReview);
            if info.heuristic_only {
                prop_assert_eq!(f.severity, Severity::NeedsHumanReview);
            }
            prop_assert!(f.snippet.chars().count() <= 200);
        }
    }

    #[test]
    fn disabling_a_rule_removes_only_its_findings(docs in corpus_strategy(), pick in 0usize..19) {
        let rule = catalog()[pick % catalog().len()].id;
        let all = run_rules(&docs, &[], &Config::default());
        let mut config = Config::default();
        config.rules.insert(rule.into(), RuleConfig { enabled: false, severity_override: None });
        let without = run_rules(&docs, &[], &config);
        let expected: Vec<&Finding> = all.iter().filter(|f| f.rule_id != rule).collect();
        prop_assert_eq!(without.iter().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn fingerprints_ignore_finding_order((findings, shuffled) in findings_strategy().prop_flat_map(|f| (Just(f.clone()), Just(f).prop_shuffle()))) {
        let a = snapshot_of(findings);
        let b = snapshot_of(shuffled);
        prop_assert_eq!(fingerprints(&a), fingerprints(&b));
        prop_assert_eq!(fingerprints(&a).len(), a.issues.len());
    }

    #[test]
    fn diff_conserves_counts(old in findings_strategy(), new in findings_strategy()) {
        let (a, b) = (snapshot_of(old), snapshot_of(new));
        let d = diff(&a, &b);
        prop_assert_eq!(d.persisting_issues.len() + d.new_issues.len(), b.issues.len());
        prop_assert_eq!(d.persisting_issues.len() + d.resolved_issues.len(), a.issues.len());
        let back = diff(&b, &a);
        prop_assert_eq!(&back.resolved_issues, &d.new_issues);
        let same = diff(&a, &a);
        prop_assert!(same.new_issues.is_empty() && same.resolved_issues.is_empty());
    }

    #[test]
    fn growing_the_baseline_never_raises_the_gate(findings in findings_strategy(), keep in prop::collection::vec(any::<bool>(), 30)) {
        let s = snapshot_of(findings);
        let full = Baseline::from_snapshot(&s);
        let partial = Baseline(full.0.iter().zip(&keep).filter(|(_, k)| **k).map(|(f, _)| f.clone()).collect());
        let counts = [
            apply_baseline(&s, &Baseline::default()).gate_count(FailOn::Warning),
            apply_baseline(&s, &partial).gate_count(FailOn::Warning),
            apply_baseline(&s, &full).gate_count(FailOn::Warning),
        ];
        prop_assert!(counts[0] >= counts[1] && counts[1] >= counts[2]);
        prop_assert_eq!(counts[2], 0);
    }

    #[test]
    fn annotations_are_idempotent(findings in findings_strategy(), purpose in "[a-z ]{0,20}") {
        let s = snapshot_of(findings);
        let overlay = AnnotationOverlay(
            s.issues
                .iter()
                .step_by(2)
                .map(|i| (i.fingerprint.clone(), Annotation {
                    context_purpose: Some(purpose.clone()),
                    instructional_necessity: Some(Necessity::Required),
                    status: Some(Status::Wontfix),
                    ..Default::default()
                }))
                .collect(),
        );
        let (once, w1) = apply_annotations(s.issues.clone(), &overlay);
        let (twice, w2) = apply_annotations(once.clone(), &overlay);
        prop_assert_eq!(&once, &twice);
        prop_assert!(w1.is_empty() && w2.is_empty());
        let fp_once: Vec<_> = once.iter().map(|i| &i.fingerprint).collect();
        let fp_orig: Vec<_> = s.issues.iter().map(|i| &i.fingerprint).collect();
        prop_assert_eq!(fp_once, fp_orig);
    }

    #[test]
    fn snapshot_json_round_trips(findings in findings_strategy()) {
        let s = snapshot_of(findings);
        let bytes = s.to_json();
        let back = AuditSnapshot::from_json("s", &bytes).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_json(), bytes);
    }

    #[test]
    fn every_issue_is_fully_classified(findings in findings_strategy()) {
        for issue in snapshot_of(findings).issues {
            prop_assert!(!issue.platform.is_empty());
            prop_assert!(!issue.course_element.is_empty());
            prop_assert!(!issue.reference.is_empty());
            prop_assert_eq!(issue.status, Status::Open);
        }
    }

    #[test]
    fn csv_has_one_row_per_issue(findings in findings_strategy(), noise in "[a-z,\"\n ]{0,30}") {
        let findings: Vec<Finding> = findings.into_iter().map(|mut f| { f.message = format!("{}{noise}", f.message); f }).collect();
        let s = snapshot_of(findings);
        let bytes = render_csv(&s);
        let mut reader = csv::Reader::from_reader(bytes.as_slice());
        prop_assert_eq!(reader.headers().unwrap().len(), 12);
        let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
        prop_assert_eq!(rows.len(), s.issues.len());
        prop_assert!(rows.iter().all(|r| r.len() == 12));
    }

    #[test]
    fn geometric_order_is_row_major_when_rows_are_separated(cells in prop::collection::btree_set((0u8..5, 0u8..8), 1..20), hidden in prop::collection::vec(any::<bool>(), 20)) {
        // Rows sit 100 units apart on a 1000x600 slide, far outside the band tolerance.
        let elements: Vec<SlideElement> = cells
            .iter()
            .zip(&hidden)
            .map(|(&(row, col), &h)| SlideElement {
                id: format!("e{row}{col}"),
                kind: ElementKind::Text,
                bbox: BBox { x: col as f64 * 110.0 + (row as f64), y: row as f64 * 100.0 + (col % 3) as f64, w: 100.0, h: 40.0 },
                visible: !h,
                alt: None,
                text: Some("t".into()),
                children: vec![],
            })
            .collect();
        let slide = Slide { index: 1, elements: elements.clone(), reading_order: None };
        let got = geometric_order(&slide, 1000.0, 600.0, 0.02);
        let mut oracle: Vec<(u8, u8, String)> = cells
            .iter()
            .zip(&hidden)
            .filter(|(_, h)| !**h)
            .map(|(&(r, c), _)| (r, c, format!("e{r}{c}")))
            .collect();
        oracle.sort();
        prop_assert_eq!(got, oracle.into_iter().map(|t| t.2).collect::<Vec<_>>());
    }
}
