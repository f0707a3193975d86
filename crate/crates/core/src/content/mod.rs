//! Corpus discovery and parsing into rule-consumable structures.

pub mod html;
pub mod markdown;
mod node;
pub mod slides;
pub mod style;

use std::fmt;
use std::path::{Component, Path};

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{Error, Result};

pub use node::{normalize_whitespace, ContentNode, Document, ParseDiagnostic, ROOT, TEXT};
pub use slides::{BBox, ElementKind, Slide, SlideDeck, SlideElement};
pub use style::{Confidence, Rgb, StyleInfo, StyleSidecar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MediaKind {
    Html,
    Markdown,
    SlideManifest,
    StyleSidecar,
    Other,
}

impl MediaKind {
    /// Default mapping from a file name. Compound suffixes are checked first.
    pub fn from_path(path: &str) -> MediaKind {
        let name = path.rsplit('/').next().unwrap_or(path).to_ascii_lowercase();
        if name.ends_with(".slides.json") {
            MediaKind::SlideManifest
        } else if name.ends_with(".styles.json") {
            MediaKind::StyleSidecar
        } else if name.ends_with(".html") || name.ends_with(".htm") || name.ends_with(".xhtml") {
            MediaKind::Html
        } else if name.ends_with(".md") || name.ends_with(".markdown") {
            MediaKind::Markdown
        } else {
            MediaKind::Other
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MediaKind::Html => "html",
            MediaKind::Markdown => "markdown",
            MediaKind::SlideManifest => "slide-manifest",
            MediaKind::StyleSidecar => "style-sidecar",
            MediaKind::Other => "other",
        }
    }
}

impl fmt::Display for MediaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    /// Corpus-relative, `/`-separated, no `.` or `..` segments.
    pub path: String,
    pub media_kind: MediaKind,
    pub byte_size: u64,
    pub content_hash: String,
}

impl SourceFile {
    pub fn from_bytes(path: impl Into<String>, media_kind: MediaKind, bytes: &[u8]) -> Self {
        SourceFile {
            path: path.into(),
            media_kind,
            byte_size: bytes.len() as u64,
            content_hash: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// A discovered file together with the bytes that were hashed.
#[derive(Debug, Clone)]
pub struct LoadedFile {
    pub file: SourceFile,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Default)]
pub struct Discovery {
    pub files: Vec<LoadedFile>,
    /// Non-fatal problems, e.g. a file that could not be read.
    pub diagnostics: Vec<String>,
}

fn build_globs(globs: &[String]) -> Result<GlobSet> {
    let mut builder = GlobSetBuilder::new();
    for g in globs {
        let glob = Glob::new(g).map_err(|e| Error::Config(format!("bad glob {g:?}: {e}")))?;
        builder.add(glob);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("bad glob set: {e}")))
}

/// Corpus-relative `/`-joined path, or `None` for names that are not UTF-8
/// or escape the root.
pub fn normalize_relative(path: &Path) -> Option<String> {
    let mut parts: Vec<&str> = Vec::new();
    for comp in path.components() {
        match comp {
            Component::Normal(s) => parts.push(s.to_str()?),
            Component::CurDir => {}
            Component::ParentDir => {
                parts.pop()?;
            }
            Component::RootDir | Component::Prefix(_) => return None,
        }
    }
    Some(parts.join("/"))
}

/// Walk `root`, returning every non-ignored file with its bytes, sorted by path.
pub fn load_corpus(root: &Path, config: &Config) -> Result<Discovery> {
    let meta = std::fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        ));
    }
    std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;

    let ignore = build_globs(&config.ignore_globs)?;
    let overrides: Vec<(GlobSet, MediaKind)> = config
        .media_overrides
        .iter()
        .map(|o| Ok((build_globs(std::slice::from_ref(&o.glob))?, o.kind)))
        .collect::<Result<_>>()?;

    let mut out = Discovery::default();
    let mut paths = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                out.diagnostics.push(format!("skipped unreadable entry: {e}"));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let Some(rel) = normalize_relative(rel) else {
            out.diagnostics
                .push(format!("skipped non-UTF-8 path {}", entry.path().display()));
            continue;
        };
        if ignore.is_match(&rel) {
            continue;
        }
        paths.push((rel, entry.into_path()));
    }
    paths.sort_by(|a, b| a.0.cmp(&b.0));

    for (rel, abs) in paths {
        let bytes = match std::fs::read(&abs) {
            Ok(b) => b,
            Err(e) => {
                out.diagnostics.push(format!("skipped unreadable file {rel}: {e}"));
                continue;
            }
        };
        let kind = overrides
            .iter()
            .find(|(g, _)| g.is_match(&rel))
            .map(|(_, k)| *k)
            .unwrap_or_else(|| MediaKind::from_path(&rel));
        out.files.push(LoadedFile {
            file: SourceFile::from_bytes(rel, kind, &bytes),
            bytes,
        });
    }
    Ok(out)
}

/// Non-ignored files under `root`, sorted by path. Unreadable files are
/// dropped; use [`load_corpus`] to see why.
pub fn discover(root: &Path, config: &Config) -> Result<Vec<SourceFile>> {
    Ok(load_corpus(root, config)?
        .files
        .into_iter()
        .map(|f| f.file)
        .collect())
}

/// Decode UTF-8 input, tolerating a leading byte-order mark.
pub fn decode_utf8<'a>(file: &SourceFile, bytes: &'a [u8]) -> Result<&'a str> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    std::str::from_utf8(bytes).map_err(|_| Error::Encoding {
        path: file.path.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn media_kind_table() {
        assert_eq!(MediaKind::from_path("deck.slides.json"), MediaKind::SlideManifest);
        assert_eq!(MediaKind::from_path("a/page.html.styles.json"), MediaKind::StyleSidecar);
        assert_eq!(MediaKind::from_path("a/B.HTML"), MediaKind::Html);
        assert_eq!(MediaKind::from_path("notes.md"), MediaKind::Markdown);
        assert_eq!(MediaKind::from_path("data.json"), MediaKind::Other);
        assert_eq!(MediaKind::from_path("pic.png"), MediaKind::Other);
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(discover(dir.path(), &Config::default()).unwrap().is_empty());
    }

    #[test]
    fn sorted_and_ignores_git() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.html"), "<p>b</p>").unwrap();
        fs::write(dir.path().join("a.md"), "# a").unwrap();
        fs::create_dir(dir.path().join(".git")).unwrap();
        fs::write(dir.path().join(".git/x"), "x").unwrap();
        let files = discover(dir.path(), &Config::default()).unwrap();
        let paths: Vec<_> = files.iter().map(|f| f.path.as_str()).collect();
        assert_eq!(paths, vec!["a.md", "b.html"]);
        assert_eq!(files[0].media_kind, MediaKind::Markdown);
        assert_eq!(files[1].byte_size, 8);
    }

    #[test]
    fn slide_manifest_kind() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("deck.slides.json"), "{}").unwrap();
        let files = discover(dir.path(), &Config::default()).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].media_kind, MediaKind::SlideManifest);
    }

    #[test]
    fn nested_paths_use_forward_slashes() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("ed/readings")).unwrap();
        fs::write(dir.path().join("ed/readings/r3.html"), "").unwrap();
        let files = discover(dir.path(), &Config::default()).unwrap();
        assert_eq!(files[0].path, "ed/readings/r3.html");
    }

    #[test]
    fn media_override_wins() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("page.txt"), "").unwrap();
        let mut config = Config::default();
        config.media_overrides.push(crate::config::MediaOverride {
            glob: "*.txt".into(),
            kind: MediaKind::Markdown,
        });
        let files = discover(dir.path(), &config).unwrap();
        assert_eq!(files[0].media_kind, MediaKind::Markdown);
    }

    #[test]
    fn missing_root_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(discover(&dir.path().join("nope"), &Config::default()).is_err());
    }

    #[test]
    fn bom_is_tolerated_and_latin1_rejected() {
        let f = SourceFile::from_bytes("x.html", MediaKind::Html, b"");
        assert_eq!(decode_utf8(&f, b"\xEF\xBB\xBFhi").unwrap(), "hi");
        assert!(matches!(decode_utf8(&f, b"caf\xE9"), Err(Error::Encoding { .. })));
    }

    #[test]
    fn normalize_drops_dot_segments() {
        assert_eq!(normalize_relative(Path::new("./a/../b/c.md")).unwrap(), "b/c.md");
        assert!(normalize_relative(Path::new("../x")).is_none());
    }
}
