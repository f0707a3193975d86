//! The full pipeline: discover, parse, resolve styles, run rules, classify,
//! annotate, snapshot.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use rayon::prelude::*;

use crate::config::Config;
use crate::content::html::parse_html;
use crate::content::markdown::parse_markdown;
use crate::content::slides::parse_slide_manifest;
use crate::content::style::resolve_styles;
use crate::content::{load_corpus, Document, LoadedFile, MediaKind, SlideDeck, StyleSidecar};
use crate::error::{Error, Result};
use crate::rules::run_rules;
use crate::snapshot::{AuditSnapshot, Resource};
use crate::taxonomy::{apply_annotations, build_issues, AnnotationOverlay};

pub const TIMESTAMP_ENV: &str = "A11Y_AUDIT_TIMESTAMP";
pub const SIDECAR_SUFFIX: &str = ".styles.json";

#[derive(Debug, Clone, Default)]
pub struct AuditOptions {
    pub config: Option<PathBuf>,
    /// Directory of `<doc path>.styles.json` files mirroring the corpus.
    pub styles: Option<PathBuf>,
    pub overlay: Option<PathBuf>,
    /// RFC 3339 timestamp to record; `None` uses the current time.
    pub timestamp: Option<String>,
}

#[derive(Debug)]
pub struct AuditOutcome {
    pub snapshot: AuditSnapshot,
    pub config: Config,
    /// Non-fatal problems: unreadable files, unmatched sidecar entries,
    /// stale annotations.
    pub warnings: Vec<String>,
}

/// Normalize to UTC with second precision, e.g. `2026-01-01T00:00:00Z`.
pub fn normalize_timestamp(raw: &str) -> Result<String> {
    let t = DateTime::parse_from_rfc3339(raw.trim()).map_err(|_| Error::Timestamp(raw.to_string()))?;
    Ok(t.with_timezone(&Utc).to_rfc3339_opts(SecondsFormat::Secs, true))
}

pub fn now_timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// The explicit timestamp if given, else `A11Y_AUDIT_TIMESTAMP`, else now.
pub fn resolve_timestamp(explicit: Option<&str>) -> Result<String> {
    match explicit.map(str::to_string).or_else(|| std::env::var(TIMESTAMP_ENV).ok()) {
        Some(raw) if !raw.trim().is_empty() => normalize_timestamp(&raw),
        _ => Ok(now_timestamp()),
    }
}

enum Parsed {
    Document(Document),
    Deck(SlideDeck),
    Skipped,
}

/// Parsed corpus ready for the rule engine.
pub struct Corpus {
    pub documents: Vec<Document>,
    pub decks: Vec<SlideDeck>,
    pub resources: Vec<Resource>,
    pub warnings: Vec<String>,
}

fn load_sidecar_dir(dir: &Path, documents: &[&LoadedFile]) -> Result<BTreeMap<String, StyleSidecar>> {
    let mut out = BTreeMap::new();
    for doc in documents {
        let path = dir.join(format!("{}{SIDECAR_SUFFIX}", doc.file.path));
        if path.is_file() {
            let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
            out.insert(doc.file.path.clone(), StyleSidecar::from_json(&path.display().to_string(), &bytes)?);
        }
    }
    Ok(out)
}

/// Discover and parse everything under `root`. Any file that fails to
/// decode or validate aborts the run.
pub fn load(root: &Path, config: &Config, styles_dir: Option<&Path>) -> Result<Corpus> {
    let discovery = load_corpus(root, config)?;
    let mut warnings = discovery.diagnostics;
    let resources = discovery.files.iter().map(|f| Resource::from(&f.file)).collect();

    let documents_in: Vec<&LoadedFile> = discovery
        .files
        .iter()
        .filter(|f| matches!(f.file.media_kind, MediaKind::Html | MediaKind::Markdown))
        .collect();

    let mut sidecars: BTreeMap<String, StyleSidecar> = BTreeMap::new();
    for f in discovery.files.iter().filter(|f| f.file.media_kind == MediaKind::StyleSidecar) {
        let target = f.file.path.strip_suffix(SIDECAR_SUFFIX).unwrap_or(&f.file.path);
        if !documents_in.iter().any(|d| d.file.path == target) {
            warnings.push(format!("{}: no document {target} for this style sidecar", f.file.path));
            continue;
        }
        sidecars.insert(target.to_string(), StyleSidecar::from_json(&f.file.path, &f.bytes)?);
    }
    if let Some(dir) = styles_dir {
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "styles directory not found"),
            ));
        }
        sidecars.extend(load_sidecar_dir(dir, &documents_in)?);
    }

    let parsed: Vec<Result<(Parsed, Vec<String>)>> = discovery
        .files
        .par_iter()
        .map(|f| {
            let (doc, unmatched) = match f.file.media_kind {
                MediaKind::Html => resolve_styles(parse_html(f.file.clone(), &f.bytes)?, sidecars.get(&f.file.path)),
                MediaKind::Markdown => {
                    resolve_styles(parse_markdown(f.file.clone(), &f.bytes)?, sidecars.get(&f.file.path))
                }
                MediaKind::SlideManifest => {
                    return Ok((Parsed::Deck(parse_slide_manifest(f.file.clone(), &f.bytes)?), Vec::new()))
                }
                MediaKind::StyleSidecar | MediaKind::Other => return Ok((Parsed::Skipped, Vec::new())),
            };
            let warnings = unmatched
                .into_iter()
                .map(|p| format!("{}: style sidecar entry {p} matches no node", f.file.path))
                .collect();
            Ok((Parsed::Document(doc), warnings))
        })
        .collect();

    let mut documents = Vec::new();
    let mut decks = Vec::new();
    for item in parsed {
        let (p, w) = item?;
        warnings.extend(w);
        match p {
            Parsed::Document(d) => documents.push(d),
            Parsed::Deck(d) => decks.push(d),
            Parsed::Skipped => {}
        }
    }
    Ok(Corpus {
        documents,
        decks,
        resources,
        warnings,
    })
}

/// Run a full audit of `root`.
pub fn audit_dir(root: &Path, options: &AuditOptions) -> Result<AuditOutcome> {
    let config = Config::load(root, options.config.as_deref())?;
    audit_with_config(root, config, options)
}

pub fn audit_with_config(root: &Path, config: Config, options: &AuditOptions) -> Result<AuditOutcome> {
    let created_at = resolve_timestamp(options.timestamp.as_deref())?;
    let overlay = match &options.overlay {
        Some(p) => {
            let bytes = std::fs::read(p).map_err(|e| Error::io(p, e))?;
            Some(AnnotationOverlay::from_json(&p.display().to_string(), &bytes)?)
        }
        None => None,
    };
    let corpus = load(root, &config, options.styles.as_deref())?;
    let mut warnings = corpus.warnings;
    let findings = run_rules(&corpus.documents, &corpus.decks, &config);
    let mut issues = build_issues(findings, &config)?;
    if let Some(overlay) = &overlay {
        let (annotated, stale) = apply_annotations(issues, overlay);
        issues = annotated;
        warnings.extend(stale);
    }
    let snapshot = AuditSnapshot::new(issues, corpus.resources, &config, created_at);
    Ok(AuditOutcome {
        snapshot,
        config,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamps_normalize_to_utc() {
        assert_eq!(normalize_timestamp("2026-03-01T12:00:00+02:00").unwrap(), "2026-03-01T10:00:00Z");
        assert_eq!(normalize_timestamp("2026-03-01T10:00:00.75Z").unwrap(), "2026-03-01T10:00:00Z");
        assert!(normalize_timestamp("yesterday").is_err());
        assert_eq!(resolve_timestamp(Some("2026-01-01T00:00:00Z")).unwrap(), "2026-01-01T00:00:00Z");
    }

    #[test]
    fn sidecars_attach_to_documents() {
        let dir = tempfile::tempdir().unwrap();
        let body = r#"<!DOCTYPE html><html lang="en"><head><title>t</title></head><body><main><p>x</p></main></body></html>"#;
        std::fs::write(dir.path().join("page.html"), body).unwrap();
        std::fs::write(
            dir.path().join("page.html.styles.json"),
            r#"{"/html/body/main[1]/p[1]": {"foreground": [210,210,210]}, "/nope": {}}"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("orphan.html.styles.json"), "{}").unwrap();
        let out = audit_dir(dir.path(), &AuditOptions { timestamp: Some("2026-01-01T00:00:00Z".into()), ..Default::default() }).unwrap();
        let rules: Vec<_> = out.snapshot.issues.iter().map(|i| i.rule_id()).collect();
        assert_eq!(rules, ["contrast-minimum"]);
        assert_eq!(out.warnings.len(), 2, "{:?}", out.warnings);
        assert_eq!(out.snapshot.resources.len(), 3);
    }

    #[test]
    fn schema_errors_are_fatal() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("d.slides.json"), r#"{"version": 2}"#).unwrap();
        assert!(audit_dir(dir.path(), &AuditOptions::default()).is_err());
    }
}
