//! Static accessibility auditor for course-material corpora: HTML and
//! Markdown pages plus slide-deck manifests.
//!
//! The pipeline is [`content`] (discover and parse) → [`rules`] (findings) →
//! [`taxonomy`] (fingerprinted, classified issues) → [`snapshot`] (persist,
//! diff, baseline) → [`report`] (JSON, CSV, Markdown). [`audit`] wires the
//! stages together; [`cli`] is the command-line front end.

pub mod audit;
pub mod canonical;
pub mod cli;
pub mod config;
pub mod content;
pub mod error;
pub mod report;
pub mod rules;
pub mod snapshot;
pub mod taxonomy;

pub use audit::{audit_dir, AuditOptions, AuditOutcome};
pub use config::Config;
pub use error::{Error, Result};
pub use rules::{contrast_ratio, relative_luminance, Finding, Severity};
pub use snapshot::{diff, AuditSnapshot, DiffReport};
pub use taxonomy::Issue;
