//! `a11y.config.json`: ignore globs, classification maps, rule toggles,
//! lexicon edits and thresholds.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::content::MediaKind;
use crate::error::{Error, Result};
use crate::rules::{catalog, Severity};

pub const CONFIG_FILE_NAME: &str = "a11y.config.json";
pub const DEFAULT_SNAPSHOT_NAME: &str = "a11y-audit.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobLabel {
    pub glob: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediaOverride {
    pub glob: String,
    pub kind: MediaKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RuleConfig {
    pub enabled: bool,
    pub severity_override: Option<Severity>,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            enabled: true,
            severity_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lexicons {
    pub visual_language_add: Vec<String>,
    pub visual_language_remove: Vec<String>,
    pub link_text_add: Vec<String>,
    pub link_text_remove: Vec<String>,
    pub image_of_text_tokens_add: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Alt text longer than this many characters gets a length warning.
    pub alt_length: usize,
    pub contrast_normal: f64,
    pub contrast_large: f64,
    pub large_pt: f64,
    pub large_bold_pt: f64,
    /// Fraction of slide height within which top edges share a row band.
    pub band_tolerance: f64,
    pub ascii_density: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            alt_length: 250,
            contrast_normal: 4.5,
            contrast_large: 3.0,
            large_pt: 18.0,
            large_bold_pt: 14.0,
            band_tolerance: 0.05,
            ascii_density: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailOn {
    #[default]
    Error,
    Warning,
}

impl FailOn {
    /// Whether an issue of `severity` counts against the gate.
    pub fn gates(self, severity: Severity) -> bool {
        match (self, severity) {
            (_, Severity::NeedsHumanReview) => false,
            (_, Severity::Error) => true,
            (FailOn::Warning, Severity::Warning) => true,
            (FailOn::Error, Severity::Warning) => false,
        }
    }
}

impl std::str::FromStr for FailOn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "error" => Ok(FailOn::Error),
            "warning" => Ok(FailOn::Warning),
            other => Err(format!("expected error or warning, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub ignore_globs: Vec<String>,
    pub media_overrides: Vec<MediaOverride>,
    pub platform_map: Vec<GlobLabel>,
    pub course_element_map: Vec<GlobLabel>,
    pub rules: BTreeMap<String, RuleConfig>,
    pub lexicons: Lexicons,
    pub thresholds: Thresholds,
    pub fail_on: FailOn,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            ignore_globs: vec![
                ".git/**".into(),
                "node_modules/**".into(),
                CONFIG_FILE_NAME.into(),
                DEFAULT_SNAPSHOT_NAME.into(),
            ],
            media_overrides: Vec::new(),
            platform_map: Vec::new(),
            course_element_map: Vec::new(),
            rules: BTreeMap::new(),
            lexicons: Lexicons::default(),
            thresholds: Thresholds::default(),
            fail_on: FailOn::Error,
        }
    }
}

impl Config {
    pub fn from_json(label: &str, bytes: &[u8]) -> Result<Config> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let config: Config = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Config(format!("{label}: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// `explicit` if given, else `<root>/a11y.config.json` if present, else defaults.
    pub fn load(root: &Path, explicit: Option<&Path>) -> Result<Config> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => {
                let p = root.join(CONFIG_FILE_NAME);
                if !p.is_file() {
                    return Ok(Config::default());
                }
                p
            }
        };
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        Config::from_json(&path.display().to_string(), &bytes)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.thresholds;
        let positive = [
            ("contrast_normal", t.contrast_normal),
            ("contrast_large", t.contrast_large),
            ("large_pt", t.large_pt),
            ("large_bold_pt", t.large_bold_pt),
            ("band_tolerance", t.band_tolerance),
            ("ascii_density", t.ascii_density),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("thresholds.{name} must be positive")));
            }
        }
        if t.alt_length == 0 {
            return Err(Error::Config("thresholds.alt_length must be positive".into()));
        }
        if t.contrast_normal < t.contrast_large {
            return Err(Error::Config(
                "thresholds.contrast_normal must be >= contrast_large".into(),
            ));
        }
        for (id, rc) in &self.rules {
            let Some(rule) = catalog().iter().find(|r| r.id == id) else {
                return Err(Error::Config(format!("unknown rule id {id:?}")));
            };
            match rc.severity_override {
                Some(Severity::NeedsHumanReview) => {
                    return Err(Error::Config(format!(
                        "rules.{id}: severity_override must be error or warning"
                    )))
                }
                Some(_) if rule.heuristic_only => {
                    return Err(Error::Config(format!(
                        "rules.{id}: heuristic rules always report needs-human-review"
                    )))
                }
                _ => {}
            }
        }
        let globs = self
            .ignore_globs
            .iter()
            .chain(self.media_overrides.iter().map(|m| &m.glob))
            .chain(self.platform_map.iter().map(|m| &m.glob))
            .chain(self.course_element_map.iter().map(|m| &m.glob));
        for g in globs {
            globset::Glob::new(g).map_err(|e| Error::Config(format!("bad glob {g:?}: {e}")))?;
        }
        Ok(())
    }

    pub fn rule_enabled(&self, id: &str) -> bool {
        self.rules.get(id).is_none_or(|r| r.enabled)
    }

    pub fn severity_override(&self, id: &str) -> Option<Severity> {
        self.rules.get(id).and_then(|r| r.severity_override)
    }

    /// SHA-256 over the canonical JSON of the effective configuration.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(crate::canonical::to_vec(self)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = Config::default();
        c.validate().unwrap();
        assert_eq!(c.thresholds.alt_length, 250);
        assert_eq!(c.thresholds.contrast_normal, 4.5);
        assert_eq!(c.thresholds.contrast_large, 3.0);
        assert_eq!(c.thresholds.band_tolerance, 0.05);
        assert_eq!(c.thresholds.ascii_density, 0.3);
        assert!(c.ignore_globs.contains(&".git/**".to_string()));
        assert!(c.ignore_globs.contains(&"node_modules/**".to_string()));
    }

    #[test]
    fn empty_object_is_defaults() {
        assert_eq!(Config::from_json("c", b"{}").unwrap(), Config::default());
    }

    #[test]
    fn unknown_rule_id_is_rejected() {
        let err = Config::from_json("c", br#"{"rules": {"alt-mising": {"enabled": false}}}"#).unwrap_err();
        assert!(err.to_string().contains("alt-mising"));
    }

    #[test]
    fn unknown_field_is_rejected() {
        assert!(Config::from_json("c", br#"{"treshold": {}}"#).is_err());
    }

    #[test]
    fn threshold_constraints() {
        assert!(Config::from_json("c", br#"{"thresholds": {"contrast_normal": 2.0}}"#).is_err());
        assert!(Config::from_json("c", br#"{"thresholds": {"band_tolerance": 0}}"#).is_err());
        assert!(Config::from_json("c", br#"{"thresholds": {"alt_length": 0}}"#).is_err());
    }

    #[test]
    fn heuristic_severity_is_fixed() {
        assert!(Config::from_json("c", br#"{"rules": {"visual-language": {"severity_override": "error"}}}"#).is_err());
        assert!(Config::from_json("c", br#"{"rules": {"doc-lang": {"severity_override": "warning"}}}"#).is_ok());
        assert!(Config::from_json("c", br#"{"rules": {"doc-lang": {"severity_override": "needs-human-review"}}}"#).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = Config::default();
        let mut b = Config::default();
        assert_eq!(a.hash(), b.hash());
        b.fail_on = FailOn::Warning;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn fail_on_levels() {
        assert!(FailOn::Error.gates(Severity::Error));
        assert!(!FailOn::Error.gates(Severity::Warning));
        assert!(FailOn::Warning.gates(Severity::Warning));
        assert!(!FailOn::Warning.gates(Severity::NeedsHumanReview));
    }
}
