//! Surface language, elaboration and bidirectional type checking.

pub mod elab;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod session;
pub mod signature;
pub mod surface;
pub mod typing;

use std::fmt;

use serde::Serialize;

use crate::syntax::Span;

pub use elab::{elaborate, elaborate_context, Scope};
pub use parser::{parse_context, parse_expr, parse_file};
pub use session::{FileReport, Session};
pub use signature::Signature;
pub use typing::{check_context, check_decl, infer, Checker, Cx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorKind {
    Parse,
    UnboundName,
    BadAnnotation,
    VariableLocked,
    TypeMismatch,
    NotAFunction,
    UniverseError,
    CannotInfer,
    OutOfRange,
    NotABinding,
    IllScoped,
    DuplicateName,
    Io,
    ManifestMismatch,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 14] = [
        ErrorKind::Parse,
        ErrorKind::UnboundName,
        ErrorKind::BadAnnotation,
        ErrorKind::VariableLocked,
        ErrorKind::TypeMismatch,
        ErrorKind::NotAFunction,
        ErrorKind::UniverseError,
        ErrorKind::CannotInfer,
        ErrorKind::OutOfRange,
        ErrorKind::NotABinding,
        ErrorKind::IllScoped,
        ErrorKind::DuplicateName,
        ErrorKind::Io,
        ErrorKind::ManifestMismatch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Parse => "PARSE",
            ErrorKind::UnboundName => "UNBOUND_NAME",
            ErrorKind::BadAnnotation => "BAD_ANNOTATION",
            ErrorKind::VariableLocked => "VARIABLE_LOCKED",
            ErrorKind::TypeMismatch => "TYPE_MISMATCH",
            ErrorKind::NotAFunction => "NOT_A_FUNCTION",
            ErrorKind::UniverseError => "UNIVERSE_ERROR",
            ErrorKind::CannotInfer => "CANNOT_INFER",
            ErrorKind::OutOfRange => "OUT_OF_RANGE",
            ErrorKind::NotABinding => "NOT_A_BINDING",
            ErrorKind::IllScoped => "ILL_SCOPED",
            ErrorKind::DuplicateName => "DUPLICATE_NAME",
            ErrorKind::Io => "IO",
            ErrorKind::ManifestMismatch => "MANIFEST_MISMATCH",
        }
    }

    pub fn parse(s: &str) -> Option<ErrorKind> {
        ErrorKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A failure from any stage of checking, with the rule that raised it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckError {
    pub kind: ErrorKind,
    pub rule: &'static str,
    pub span: Option<Span>,
    pub message: String,
    pub decl: Option<Box<str>>,
    pub file: Option<Box<str>>,
    /// 1-based line and column of the span start, once the source is known.
    pub position: Option<(u32, u32)>,
}

impl CheckError {
    pub fn new(kind: ErrorKind, rule: &'static str, span: Option<Span>, message: String) -> Self {
        CheckError {
            kind,
            rule,
            span,
            message,
            decl: None,
            file: None,
            position: None,
        }
    }

    pub fn in_decl(mut self, name: &str) -> Self {
        self.decl.get_or_insert_with(|| name.into());
        self
    }

    /// Attach the file name and resolve the span into a line and column.
    pub fn in_file(mut self, file: &str, src: &str) -> Self {
        if self.file.is_none() {
            self.file = Some(file.into());
            if let Some(span) = self.span {
                self.position = Some(line_col(src, span.start));
            }
        }
        self
    }
}

pub fn line_col(src: &str, offset: usize) -> (u32, u32) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line as u32, col as u32)
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
            if let Some((l, c)) = self.position {
                write!(f, "{l}:{c}:")?;
            }
            write!(f, " ")?;
        } else if let Some(span) = self.span {
            write!(f, "{span}: ")?;
        }
        write!(f, "{} [{}]", self.kind, self.rule)?;
        if let Some(d) = &self.decl {
            write!(f, " in `{d}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for CheckError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip() {
        for k in ErrorKind::ALL {
            assert_eq!(ErrorKind::parse(k.as_str()), Some(k));
        }
    }

    #[test]
    fn line_and_column() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
