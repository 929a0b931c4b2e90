//! Running the checked library against its manifest of expected outcomes.
//!
//! The manifest lists one file per line, `NAME ACCEPT` or `NAME REJECT KIND`.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::check::{ErrorKind, Session};

pub const MANIFEST: &str = "manifest";
pub const EXTENSION: &str = "ttt";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Accept,
    Reject(ErrorKind),
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Accept => write!(f, "ACCEPT"),
            Expected::Reject(k) => write!(f, "REJECT {k}"),
        }
    }
}

impl Serialize for Expected {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: String,
    pub expected: Expected,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}

impl CorpusError {
    pub fn kind(&self) -> &'static str {
        match self {
            CorpusError::Io { .. } => ErrorKind::Io.as_str(),
            CorpusError::Manifest { .. } => ErrorKind::Parse.as_str(),
        }
    }
}

impl Manifest {
    pub fn parse(src: &str) -> Result<Manifest, CorpusError> {
        let mut entries: Vec<ManifestEntry> = Vec::new();
        for (n, raw) in src.lines().enumerate() {
            let line = n + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let err = |message: String| CorpusError::Manifest { line, message };
            let words: Vec<&str> = text.split_whitespace().collect();
            let expected = match words[1..] {
                ["ACCEPT"] => Expected::Accept,
                ["REJECT", kind] => {
                    Expected::Reject(ErrorKind::parse(kind).ok_or_else(|| err(format!("unknown error kind `{kind}`")))?)
                }
                _ => {
                    return Err(err(format!(
                        "expected `FILE ACCEPT` or `FILE REJECT KIND`, found `{text}`"
                    )))
                }
            };
            entries.push(ManifestEntry {
                file: words[0].to_string(),
                expected,
                line,
            });
        }
        Ok(Manifest { entries })
    }

    pub fn load(dir: &Path) -> Result<Manifest, CorpusError> {
        let path = dir.join(MANIFEST);
        let src = fs::read_to_string(&path).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Manifest::parse(&src)
    }

    /// Problems with coverage: duplicates and corpus files the manifest omits.
    pub fn coverage_problems(&self, dir: &Path) -> Result<Vec<String>, CorpusError> {
        let mut problems = Vec::new();
        let mut seen = BTreeSet::new();
        for e in &self.entries {
            if !seen.insert(e.file.as_str()) {
                problems.push(format!("`{}` is listed more than once", e.file));
            }
        }
        let listing = fs::read_dir(dir).map_err(|e| CorpusError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        let mut on_disk = BTreeSet::new();
        for entry in listing.flatten() {
            let path = entry.path();
            if path.extension().is_some_and(|x| x == EXTENSION) {
                if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                    on_disk.insert(name.to_string());
                }
            }
        }
        for name in &on_disk {
            if !seen.contains(name.as_str()) {
                problems.push(format!("`{name}` is not listed in the manifest"));
            }
        }
        Ok(problems)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum Outcome {
    Accepted { declarations: usize },
    Rejected { kind: ErrorKind, message: String },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Accepted { declarations } => write!(f, "ACCEPT ({declarations} declarations)"),
            Outcome::Rejected { kind, .. } => write!(f, "REJECT {kind}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileResult {
    pub file: String,
    pub expected: Expected,
    pub outcome: Outcome,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub results: Vec<FileResult>,
    pub files: usize,
    pub passed: usize,
    pub failed: usize,
    /// Declarations contributed by accepted files, each counted once.
    pub declarations: usize,
    pub postulates: usize,
    /// Coverage problems; any entry here is a MANIFEST_MISMATCH.
    pub manifest_problems: Vec<String>,
}

impl CorpusReport {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.manifest_problems.is_empty()
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.results.iter().map(|r| r.file.len()).max().unwrap_or(0);
        for r in &self.results {
            let mark = if r.pass { "pass" } else { "FAIL" };
            write!(
                f,
                "{mark}  {:width$}  expected {:<24} got {}",
                r.file,
                r.expected.to_string(),
                r.outcome
            )?;
            if let (false, Outcome::Rejected { message, .. }) = (r.pass, &r.outcome) {
                write!(f, "\n      {message}")?;
            }
            writeln!(f)?;
        }
        for p in &self.manifest_problems {
            writeln!(f, "{}: {p}", ErrorKind::ManifestMismatch)?;
        }
        writeln!(
            f,
            "{} files, {} passed, {} failed; {} declarations ({} postulates)",
            self.files, self.passed, self.failed, self.declarations, self.postulates
        )
    }
}

/// Check one file in a fresh session.
pub fn check_one(path: &Path) -> (Outcome, usize) {
    let mut session = Session::new();
    match session.check_file(path) {
        Ok(report) => {
            let postulates = report.declarations.iter().filter(|d| d.is_postulate()).count();
            (
                Outcome::Accepted {
                    declarations: report.declarations.len(),
                },
                postulates,
            )
        }
        Err(e) => (
            Outcome::Rejected {
                kind: e.kind,
                message: e.to_string(),
            },
            0,
        ),
    }
}

/// Run every manifest entry in order.
pub fn run_corpus(dir: &Path) -> Result<CorpusReport, CorpusError> {
    let manifest = Manifest::load(dir)?;
    let manifest_problems = manifest.coverage_problems(dir)?;
    let mut results = Vec::new();
    let mut declarations = 0;
    let mut postulates = 0;
    for entry in &manifest.entries {
        let path: PathBuf = dir.join(&entry.file);
        let (outcome, posts) = check_one(&path);
        let pass = match (&entry.expected, &outcome) {
            (Expected::Accept, Outcome::Accepted { .. }) => true,
            (Expected::Reject(want), Outcome::Rejected { kind, .. }) => want == kind,
            _ => false,
        };
        if let (Expected::Accept, Outcome::Accepted { declarations: n }) = (&entry.expected, &outcome) {
            declarations += n;
            postulates += posts;
        }
        results.push(FileResult {
            file: entry.file.clone(),
            expected: entry.expected,
            outcome,
            pass,
        });
    }
    let passed = results.iter().filter(|r| r.pass).count();
    Ok(CorpusReport {
        files: results.len(),
        failed: results.len() - passed,
        passed,
        declarations,
        postulates,
        results,
        manifest_problems,
    })
}
