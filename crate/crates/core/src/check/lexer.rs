//! Tokenizer for the surface language.

use crate::syntax::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    /// `:(` with no space, opening a modality annotation.
    ColonParen,
    Colon,
    ColonEq,
    Comma,
    Dot,
    Arrow,
    Times,
    Eq,
    LAngle,
    RAngle,
    Bar,
    Slash,
    At,
    Compose,
    Lambda,
    Sigma,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::ColonParen => "`:(`".into(),
            Tok::Colon => "`:`".into(),
            Tok::ColonEq => "`:=`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`→`".into(),
            Tok::Times => "`×`".into(),
            Tok::Eq => "`=`".into(),
            Tok::LAngle => "`⟨`".into(),
            Tok::RAngle => "`⟩`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Slash => "`/`".into(),
            Tok::At => "`@`".into(),
            Tok::Compose => "`∘`".into(),
            Tok::Lambda => "`λ`".into(),
            Tok::Sigma => "`Σ`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() || c == '_') && !matches!(c, 'λ' | 'Σ')
}

fn is_ident_char(c: char) -> bool {
    is_ident_start(c) || c.is_numeric() || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let end_of = |i: usize| chars.get(i).map_or(src.len(), |c| c.0);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        let next = chars.get(i + 1).map(|c| c.1);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && next == Some('-') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let single = |tok| (tok, 1);
        let (tok, len) = match c {
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            ':' if next == Some('(') => (Tok::ColonParen, 2),
            ':' if next == Some('=') => (Tok::ColonEq, 2),
            ':' => single(Tok::Colon),
            ',' => single(Tok::Comma),
            '.' => single(Tok::Dot),
            '→' => single(Tok::Arrow),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '×' | '*' => single(Tok::Times),
            '=' => single(Tok::Eq),
            '⟨' | '<' => single(Tok::LAngle),
            '⟩' | '>' => single(Tok::RAngle),
            '|' => single(Tok::Bar),
            '/' => single(Tok::Slash),
            '@' => single(Tok::At),
            '∘' => single(Tok::Compose),
            'λ' | '\\' => single(Tok::Lambda),
            'Σ' => single(Tok::Sigma),
            '"' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].1 != '"' && chars[j].1 != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j].1 != '"' {
                    return Err(LexError {
                        span: Span::new(start, end_of(j)),
                        message: "unterminated string".into(),
                    });
                }
                let text = src[end_of(i + 1)..chars[j].0].to_string();
                (Tok::Str(text), j + 1 - i)
            }
            c if is_ident_start(c) || c.is_numeric() => {
                let mut j = i + 1;
                loop {
                    match chars.get(j).map(|c| c.1) {
                        Some(d) if is_ident_char(d) => j += 1,
                        // `-` joins words, as in `meet-idem`, but never
                        // starts a comment or an arrow
                        Some('-')
                            if chars
                                .get(j + 1)
                                .is_some_and(|d| d.1.is_alphanumeric() && !matches!(d.1, 'λ' | 'Σ')) =>
                        {
                            j += 2
                        }
                        _ => break,
                    }
                }
                let text = src[start..end_of(j)].to_string();
                (Tok::Ident(text), j - i)
            }
            other => {
                return Err(LexError {
                    span: Span::new(start, start + other.len_utf8()),
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push(Token {
            tok,
            span: Span::new(start, end_of(i + len)),
        });
        i += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len()),
    });
    Ok(out)
}
