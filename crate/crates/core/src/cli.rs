//! Command-line front end. Exit codes: 0 success, 1 gate failure, 2
//! execution or usage error.

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::audit::{audit_dir, AuditOptions};
use crate::config::{FailOn, DEFAULT_SNAPSHOT_NAME};
use crate::error::{Error, Result};
use crate::report::{render, render_diff, render_summary, render_summary_pair, ReportFormat};
use crate::rules::catalog;
use crate::snapshot::{apply_baseline, diff, AuditSnapshot, Baseline};
use crate::taxonomy::AnnotationOverlay;

pub const EXIT_OK: i32 = 0;
pub const EXIT_GATE_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const TOP_OFFENDERS: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "a11y-audit", version, about = "Static accessibility audit for course materials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Audit a directory and write a snapshot.
    Audit {
        root: PathBuf,
        #[command(flatten)]
        inputs: AuditInputs,
        #[arg(long, default_value = "json", value_parser = parse_format)]
        format: ReportFormat,
        #[arg(long, default_value = DEFAULT_SNAPSHOT_NAME)]
        out: PathBuf,
    },
    /// Audit a directory and fail if gating issues remain.
    Gate {
        root: PathBuf,
        #[command(flatten)]
        inputs: AuditInputs,
        /// JSON list of fingerprints that do not fail the gate.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Lowest severity that fails the gate (overrides the config).
        #[arg(long, value_parser = parse_fail_on)]
        fail_on: Option<FailOn>,
    },
    /// Compare two snapshots.
    Diff {
        old: PathBuf,
        new: PathBuf,
        #[arg(long, default_value = "markdown", value_parser = parse_format)]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the rule catalog as JSON.
    Rules,
    /// Totals for a snapshot, optionally against an older one.
    Summary {
        snapshot: PathBuf,
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long, default_value = "markdown", value_parser = parse_format)]
        format: ReportFormat,
    },
    /// Write a baseline containing every fingerprint in a snapshot.
    Baseline {
        snapshot: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Annotation overlay helpers.
    Annotate {
        #[command(subcommand)]
        command: AnnotateCommand,
    },
}

#[derive(Subcommand, Debug)]
enum AnnotateCommand {
    /// Skeleton overlay with an entry per needs-human-review issue.
    Init {
        snapshot: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct AuditInputs {
    /// Config file (default: <root>/a11y.config.json if present).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory of computed-style sidecars mirroring the corpus layout.
    #[arg(long)]
    styles: Option<PathBuf>,
    /// Annotation overlay to merge into the issues.
    #[arg(long)]
    overlay: Option<PathBuf>,
}

impl AuditInputs {
    fn options(&self) -> AuditOptions {
        AuditOptions {
            config: self.config.clone(),
            styles: self.styles.clone(),
            overlay: self.overlay.clone(),
            timestamp: None,
        }
    }
}

fn parse_format(s: &str) -> std::result::Result<ReportFormat, String> {
    s.parse()
}

fn parse_fail_on(s: &str) -> std::result::Result<FailOn, String> {
    s.parse()
}

/// Terminal styling, off when `NO_COLOR` is set or output is not a terminal.
#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub color: bool,
}

impl Style {
    pub fn detect() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Style {
            color: !no_color && std::io::stdout().is_terminal(),
        }
    }

    fn paint(self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn red(self, text: &str) -> String {
        self.paint("1;31", text)
    }

    fn green(self, text: &str) -> String {
        self.paint("1;32", text)
    }

    fn dim(self, text: &str) -> String {
        self.paint("2", text)
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn load_snapshot(path: &Path) -> Result<AuditSnapshot> {
    AuditSnapshot::from_json(&path.display().to_string(), &read(path)?)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => out.write_all(bytes).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn warn_all(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

/// Parse `args` (including the program name) and run. Never panics on bad
/// input; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, style: Style) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err, style) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write, style: Style) -> Result<i32> {
    match command {
        Command::Audit { root, inputs, format, out: path } => {
            let outcome = audit_dir(&root, &inputs.options())?;
            warn_all(err, &outcome.warnings);
            write_file(&path, &render(&outcome.snapshot, format))?;
            emit(out, None, &render_summary(&outcome.snapshot, ReportFormat::Markdown))?;
            let _ = writeln!(out, "\n{}", style.dim(&format!("wrote {}", path.display())));
            Ok(EXIT_OK)
        }
        Command::Gate { root, inputs, baseline, fail_on } => {
            let outcome = audit_dir(&root, &inputs.options())?;
            warn_all(err, &outcome.warnings);
            let baseline = match &baseline {
                Some(p) => Baseline::from_json(&p.display().to_string(), &read(p)?)?,
                None => Baseline::default(),
            };
            let fail_on = fail_on.unwrap_or(outcome.config.fail_on);
            let gated = apply_baseline(&outcome.snapshot, &baseline);
            let failing: Vec<_> = gated.failing(fail_on).collect();
            let level = match fail_on {
                FailOn::Error => "error",
                FailOn::Warning => "warning",
            };
            let _ = writeln!(out, "{} gating issue(s) at severity {level} or above", failing.len());
            for issue in failing.iter().take(TOP_OFFENDERS) {
                let _ = writeln!(
                    out,
                    "  {} {} {}: {}",
                    issue.severity(),
                    issue.rule_id(),
                    issue.reference,
                    issue.finding.message
                );
            }
            if failing.len() > TOP_OFFENDERS {
                let _ = writeln!(out, "  ... and {} more", failing.len() - TOP_OFFENDERS);
            }
            if !gated.ratchet_progress.is_empty() {
                let _ = writeln!(
                    out,
                    "ratchet progress: {} baseline fingerprint(s) no longer occur and can be removed",
                    gated.ratchet_progress.len()
                );
                for fp in &gated.ratchet_progress {
                    let _ = writeln!(out, "  {fp}");
                }
            }
            if failing.is_empty() {
                let _ = writeln!(out, "{}", style.green("PASS"));
                Ok(EXIT_OK)
            } else {
                let _ = writeln!(out, "{}", style.red("FAIL"));
                Ok(EXIT_GATE_FAILED)
            }
        }
        Command::Diff { old, new, format, out: path } => {
            let (a, b) = (load_snapshot(&old)?, load_snapshot(&new)?);
            let report = diff(&a, &b);
            if let Some(skew) = &report.version_skew {
                let _ = writeln!(err, "warning: version skew: {} was written by {}, {} by {}", old.display(), skew.old, new.display(), skew.new);
            }
            emit(out, path.as_deref(), &render_diff(&report, format))?;
            Ok(EXIT_OK)
        }
        Command::Rules => {
            emit(out, None, &crate::canonical::to_vec(&catalog()))?;
            Ok(EXIT_OK)
        }
        Command::Summary { snapshot, against, format } => {
            let current = load_snapshot(&snapshot)?;
            let bytes = match against {
                Some(old) => render_summary_pair(&load_snapshot(&old)?, &current, format),
                None => render_summary(&current, format),
            };
            emit(out, None, &bytes)?;
            Ok(EXIT_OK)
        }
        Command::Baseline { snapshot, out: path } => {
            let s = load_snapshot(&snapshot)?;
            emit(out, path.as_deref(), &Baseline::from_snapshot(&s).to_json())?;
            Ok(EXIT_OK)
        }
        Command::Annotate { command: AnnotateCommand::Init { snapshot, out: path } } => {
            let s = load_snapshot(&snapshot)?;
            let skeleton = AnnotationOverlay::skeleton(&s.issues);
            emit(out, path.as_deref(), &crate::canonical::to_vec(&skeleton))?;
            Ok(EXIT_OK)
        }
    }
}
