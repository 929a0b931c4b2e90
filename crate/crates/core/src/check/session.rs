//! Checking whole files, following `import`s.

use std::fs;
use std::path::{Path, PathBuf};

use super::elab::{elaborate_decl, Scope};
use super::parser::parse_file;
use super::signature::Signature;
use super::surface::Item;
use super::typing::check_decl;
use super::{CheckError, ErrorKind};
use crate::syntax::Declaration;

/// The declarations a file contributed, after checking.
#[derive(Debug, Clone)]
pub struct FileReport {
    pub file: String,
    pub imports: Vec<String>,
    pub declarations: Vec<Declaration>,
}

/// A growing signature shared by a file and everything it imports.
#[derive(Default)]
pub struct Session {
    pub sig: Signature,
    loaded: Vec<PathBuf>,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check_file(&mut self, path: &Path) -> Result<FileReport, CheckError> {
        let display = path.display().to_string();
        let src = fs::read_to_string(path).map_err(|e| {
            let mut err = CheckError::new(ErrorKind::Io, "read", None, format!("cannot read: {e}"));
            err.file = Some(display.as_str().into());
            err
        })?;
        if let Ok(canon) = path.canonicalize() {
            if !self.loaded.contains(&canon) {
                self.loaded.push(canon);
            }
        }
        self.check_source(&display, &src, path.parent())
    }

    /// Check source text; imports resolve against `dir`.
    pub fn check_source(&mut self, file: &str, src: &str, dir: Option<&Path>) -> Result<FileReport, CheckError> {
        let items = parse_file(src).map_err(|e| e.in_file(file, src))?;
        let mut report = FileReport {
            file: file.to_string(),
            imports: Vec::new(),
            declarations: Vec::new(),
        };
        for item in items {
            match item {
                Item::Import(name, span) => {
                    let path = dir.map_or_else(|| PathBuf::from(&name), |d| d.join(&name));
                    report.imports.push(name.clone());
                    let canon = path.canonicalize().map_err(|e| {
                        CheckError::new(
                            ErrorKind::Io,
                            "import",
                            Some(span),
                            format!("cannot import {name:?}: {e}"),
                        )
                        .in_file(file, src)
                    })?;
                    if !self.loaded.contains(&canon) {
                        self.check_file(&path)?;
                    }
                }
                Item::Decl(d) => {
                    let name = d.name.name.clone();
                    let sig = &self.sig;
                    let is_global = |n: &str| sig.contains(n);
                    let mut scope = Scope::new(&is_global);
                    let decl = elaborate_decl(&mut scope, &d)
                        .and_then(|decl| check_decl(sig, &decl))
                        .map_err(|e| e.in_decl(&name).in_file(file, src))?;
                    self.sig.push(decl.clone());
                    report.declarations.push(decl);
                }
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(src: &str) -> Result<FileReport, CheckError> {
        Session::new().check_source("test.ttt", src, None)
    }

    #[test]
    fn definitions_and_postulates() {
        let r = run("postulate A : U\npostulate c : A\ndef idA (x : A) : A := x\ndef b : Bool := true\n").unwrap();
        assert_eq!(r.declarations.len(), 4);
    }

    #[test]
    fn body_type_mismatch() {
        let e = run("def b : Nat := true").unwrap_err();
        assert_eq!(e.kind, ErrorKind::TypeMismatch);
        assert_eq!(e.decl.as_deref(), Some("b"));
        assert_eq!(e.position, Some((1, 16)));
    }

    #[test]
    fn duplicate_names() {
        let e = run("postulate A : U\npostulate A : U").unwrap_err();
        assert_eq!(e.kind, ErrorKind::DuplicateName);
    }

    #[test]
    fn missing_import() {
        let e = run("import \"nowhere.ttt\"").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Io);
    }
}
