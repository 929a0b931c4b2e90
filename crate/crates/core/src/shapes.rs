//! Positive sequents over interval variables, decided in two semantics.
//!
//! SIMPLICIAL reads the interval as a finite chain and checks every
//! assignment. CUBICAL reads it as an arbitrary bounded distributive lattice.
//! The hypotheses are equations, so the lattice they present is an initial
//! model: atoms are preserved by homomorphisms and every model of the
//! hypotheses receives one from it. A positive conclusion therefore holds in
//! every model iff it holds in this generic one, where it is evaluated
//! directly (each atom by table comparison, ∧ and ∨ as booleans).
//!
//! When the hypotheses force `0 = 1` there are no points in either semantics
//! and the sequent is vacuously valid.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{LatError, LatTerm, Lattice, Presentation};

pub const DEFAULT_SIMPLICIAL_BOUND: usize = 5;
pub const DEFAULT_CUBICAL_BOUND: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Semantics {
    Simplicial,
    Cubical,
}

impl Semantics {
    pub const ALL: [Semantics; 2] = [Semantics::Simplicial, Semantics::Cubical];
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Simplicial => "SIMPLICIAL",
            Semantics::Cubical => "CUBICAL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Le(LatTerm, LatTerm),
    Eq(LatTerm, LatTerm),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Top,
    Bot,
    Atom(Atom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn le(a: LatTerm, b: LatTerm) -> Formula {
        Formula::Atom(Atom::Le(a, b))
    }

    pub fn eq(a: LatTerm, b: LatTerm) -> Formula {
        Formula::Atom(Atom::Eq(a, b))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |t: &LatTerm| match t {
            LatTerm::Meet(..) | LatTerm::Join(..) => format!("({t})"),
            _ => t.to_string(),
        };
        match self {
            Atom::Le(a, b) => write!(f, "{} <= {}", side(a), side(b)),
            Atom::Eq(a, b) => write!(f, "{} = {}", side(a), side(b)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Formula, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Formula::Top => write!(f, "true"),
                Formula::Bot => write!(f, "false"),
                Formula::Atom(a) => write!(f, "{a}"),
                Formula::Or(a, b) => {
                    if prec > 0 {
                        write!(f, "(")?;
                    }
                    go(a, 0, f)?;
                    write!(f, " \\/ ")?;
                    go(b, 0, f)?;
                    if prec > 0 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Formula::And(a, b) => {
                    if prec > 1 {
                        write!(f, "(")?;
                    }
                    go(a, 1, f)?;
                    write!(f, " /\\ ")?;
                    go(b, 1, f)?;
                    if prec > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub name: String,
    pub vars: Vec<String>,
    pub hyps: Vec<Atom>,
    pub goal: Formula,
    /// Verdicts the file asserts, checked by [`report`].
    pub expect: Vec<(Semantics, bool)>,
}

impl Sequent {
    pub fn new(name: &str, vars: &[&str], hyps: Vec<Atom>, goal: Formula) -> Sequent {
        Sequent {
            name: name.to_string(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            hyps,
            goal,
            expect: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("{vars} variables exceed the {semantics} bound of {bound}")]
    BoundExceeded {
        semantics: Semantics,
        vars: usize,
        bound: usize,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("chain size must be at least 2, got {0}")]
    BadChain(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl ShapeError {
    pub fn kind(&self) -> &'static str {
        match self {
            ShapeError::BoundExceeded { .. } => "BOUND_EXCEEDED",
            ShapeError::UnknownVariable(_) => "UNKNOWN_GENERATOR",
            ShapeError::BadChain(_) => "USAGE",
            ShapeError::Parse { .. } => "PARSE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub simplicial_bound: usize,
    pub cubical_bound: usize,
    /// Number of points in the chain; defaults to variables + 2.
    pub chain: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            simplicial_bound: DEFAULT_SIMPLICIAL_BOUND,
            cubical_bound: DEFAULT_CUBICAL_BOUND,
            chain: None,
        }
    }
}

pub fn decide(seq: &Sequent, sem: Semantics, opts: &Options) -> Result<bool, ShapeError> {
    check_scope(seq)?;
    match sem {
        Semantics::Simplicial => {
            let k = seq.vars.len();
            if k > opts.simplicial_bound {
                return Err(ShapeError::BoundExceeded {
                    semantics: sem,
                    vars: k,
                    bound: opts.simplicial_bound,
                });
            }
            let size = opts.chain.unwrap_or(k + 2);
            if size < 2 {
                return Err(ShapeError::BadChain(size));
            }
            Ok(decide_chain(seq, size))
        }
        Semantics::Cubical => {
            let k = seq.vars.len();
            if k > opts.cubical_bound {
                return Err(ShapeError::BoundExceeded {
                    semantics: sem,
                    vars: k,
                    bound: opts.cubical_bound,
                });
            }
            Ok(decide_generic(seq, k))
        }
    }
}

fn check_scope(seq: &Sequent) -> Result<(), ShapeError> {
    let mut used = Vec::new();
    for a in &seq.hyps {
        atom_generators(a, &mut used);
    }
    formula_generators(&seq.goal, &mut used);
    match used.into_iter().find(|g| !seq.vars.contains(g)) {
        Some(g) => Err(ShapeError::UnknownVariable(g)),
        None => Ok(()),
    }
}

fn atom_generators(a: &Atom, out: &mut Vec<String>) {
    let (Atom::Le(x, y) | Atom::Eq(x, y)) = a;
    x.generators(out);
    y.generators(out);
}

fn formula_generators(f: &Formula, out: &mut Vec<String>) {
    match f {
        Formula::Top | Formula::Bot => {}
        Formula::Atom(a) => atom_generators(a, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            formula_generators(a, out);
            formula_generators(b, out);
        }
    }
}

/// Brute force over assignments into the chain `0 < 1 < … < size-1`.
pub fn decide_chain(seq: &Sequent, size: usize) -> bool {
    let k = seq.vars.len();
    let top = size - 1;
    let mut values = vec![0usize; k];
    loop {
        let holds = |a: &Atom| chain_atom(a, &seq.vars, &values, top);
        if seq.hyps.iter().all(holds) && !chain_formula(&seq.goal, &seq.vars, &values, top) {
            return false;
        }
        // odometer
        let mut i = 0;
        loop {
            if i == k {
                return true;
            }
            values[i] += 1;
            if values[i] <= top {
                break;
            }
            values[i] = 0;
            i += 1;
        }
    }
}

fn chain_term(t: &LatTerm, vars: &[String], values: &[usize], top: usize) -> usize {
    match t {
        LatTerm::Zero => 0,
        LatTerm::One => top,
        LatTerm::Gen(g) => values[vars.iter().position(|v| v == g).expect("scope checked")],
        LatTerm::Meet(a, b) => chain_term(a, vars, values, top).min(chain_term(b, vars, values, top)),
        LatTerm::Join(a, b) => chain_term(a, vars, values, top).max(chain_term(b, vars, values, top)),
    }
}

fn chain_atom(a: &Atom, vars: &[String], values: &[usize], top: usize) -> bool {
    match a {
        Atom::Le(x, y) => chain_term(x, vars, values, top) <= chain_term(y, vars, values, top),
        Atom::Eq(x, y) => chain_term(x, vars, values, top) == chain_term(y, vars, values, top),
    }
}

fn chain_formula(f: &Formula, vars: &[String], values: &[usize], top: usize) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Atom(a) => chain_atom(a, vars, values, top),
        Formula::And(a, b) => chain_formula(a, vars, values, top) && chain_formula(b, vars, values, top),
        Formula::Or(a, b) => chain_formula(a, vars, values, top) || chain_formula(b, vars, values, top),
    }
}

/// The lattice presented by the variables and hypotheses.
pub fn generic_model(seq: &Sequent, bound: usize) -> Result<Lattice, LatError> {
    let mut pres = Presentation {
        generators: seq.vars.clone(),
        relations: Vec::new(),
    };
    for h in &seq.hyps {
        match h {
            Atom::Le(a, b) => pres.add_le(a.clone(), b.clone()),
            Atom::Eq(a, b) => pres.relations.push((a.clone(), b.clone())),
        }
    }
    Lattice::new(pres, bound)
}

fn decide_generic(seq: &Sequent, bound: usize) -> bool {
    let lat = generic_model(seq, bound).expect("scope and bound checked");
    if lat.points.is_empty() {
        return true;
    }
    fn holds(lat: &Lattice, f: &Formula) -> bool {
        match f {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Atom(Atom::Le(a, b)) => lat.decide_leq(a, b).expect("scope checked"),
            Formula::Atom(Atom::Eq(a, b)) => lat.decide_eq(a, b).expect("scope checked"),
            Formula::And(a, b) => holds(lat, a) && holds(lat, b),
            Formula::Or(a, b) => holds(lat, a) || holds(lat, b),
        }
    }
    holds(&lat, &seq.goal)
}

/// Serialized as `true`, `false` or `{"error": KIND, "message": ...}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
    Error { kind: String, message: String },
}

impl Verdict {
    fn of(r: Result<bool, ShapeError>) -> Verdict {
        match r {
            Ok(true) => Verdict::Valid,
            Ok(false) => Verdict::Invalid,
            Err(e) => Verdict::Error {
                kind: e.kind().to_string(),
                message: e.to_string(),
            },
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::Valid => Some(true),
            Verdict::Invalid => Some(false),
            Verdict::Error { .. } => None,
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Verdict::Valid => s.serialize_bool(true),
            Verdict::Invalid => s.serialize_bool(false),
            Verdict::Error { kind, message } => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("error", kind)?;
                m.serialize_entry("message", message)?;
                m.end()
            }
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "valid"),
            Verdict::Invalid => write!(f, "invalid"),
            Verdict::Error { kind, .. } => write!(f, "error({kind})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportItem {
    pub name: String,
    pub sequent: String,
    #[serde(rename = "SIMPLICIAL")]
    pub simplicial: Verdict,
    #[serde(rename = "CUBICAL")]
    pub cubical: Verdict,
    /// Expectations written in the file that the verdicts contradict.
    pub unmet: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ShapeReport {
    pub items: Vec<ReportItem>,
}

impl ShapeReport {
    pub fn all_expectations_met(&self) -> bool {
        self.items.iter().all(|i| i.unmet.is_empty())
    }

    pub fn errors(&self) -> usize {
        self.items
            .iter()
            .flat_map(|i| [&i.simplicial, &i.cubical])
            .filter(|v| matches!(v, Verdict::Error { .. }))
            .count()
    }
}

impl fmt::Display for ShapeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.items.iter().map(|i| i.name.len()).max().unwrap_or(0).max(4);
        writeln!(f, "{:width$}  {:<12}  {:<12}", "name", "SIMPLICIAL", "CUBICAL")?;
        for i in &self.items {
            write!(
                f,
                "{:width$}  {:<12}  {:<12}",
                i.name,
                i.simplicial.to_string(),
                i.cubical.to_string()
            )?;
            if !i.unmet.is_empty() {
                write!(f, "  UNEXPECTED: {}", i.unmet.join(", "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hyps: Vec<String> = self.hyps.iter().map(|a| a.to_string()).collect();
        write!(f, "{} |- {}", hyps.join(", "), self.goal)
    }
}

pub fn report(batch: &[Sequent], opts: &Options) -> ShapeReport {
    let items = batch
        .iter()
        .map(|seq| {
            let simplicial = Verdict::of(decide(seq, Semantics::Simplicial, opts));
            let cubical = Verdict::of(decide(seq, Semantics::Cubical, opts));
            let unmet = seq
                .expect
                .iter()
                .filter(|(sem, want)| {
                    let got = match sem {
                        Semantics::Simplicial => &simplicial,
                        Semantics::Cubical => &cubical,
                    };
                    got.as_bool() != Some(*want)
                })
                .map(|(sem, want)| format!("{sem} {}", if *want { "valid" } else { "invalid" }))
                .collect();
            ReportItem {
                name: seq.name.clone(),
                sequent: seq.to_string(),
                simplicial,
                cubical,
                unmet,
            }
        })
        .collect();
    ShapeReport { items }
}

// ---------------------------------------------------------------------------
// File syntax

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(i64),
    Sym(&'static str),
}

const SYMBOLS: &[(&str, &str)] = &[
    ("/\\", "/\\"),
    ("\\/", "\\/"),
    ("∧", "/\\"),
    ("∨", "\\/"),
    ("<=", "<="),
    ("≤", "<="),
    (">=", ">="),
    ("≥", ">="),
    ("|-", "|-"),
    ("..", ".."),
    ("=", "="),
    ("(", "("),
    (")", ")"),
    ("[", "["),
    ("]", "]"),
    ("{", "{"),
    ("}", "}"),
    (";", ";"),
    (",", ","),
    (".", "."),
    ("+", "+"),
    ("-", "-"),
    ("⊤", "true"),
    ("⊥", "false"),
];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ShapeError> {
    let mut out = Vec::new();
    for (n, line) in src.lines().enumerate() {
        let line_no = n + 1;
        let line = match (line.find("--"), line.find('#')) {
            (Some(a), Some(b)) => &line[..a.min(b)],
            (Some(a), None) | (None, Some(a)) => &line[..a],
            (None, None) => line,
        };
        let mut rest = line;
        'outer: while let Some(c) = rest.chars().next() {
            if c.is_whitespace() {
                rest = &rest[c.len_utf8()..];
                continue;
            }
            if c.is_ascii_digit() {
                let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
                let n = rest[..end].parse().map_err(|_| ShapeError::Parse {
                    line: line_no,
                    message: "number too large".into(),
                })?;
                out.push((Tok::Num(n), line_no));
                rest = &rest[end..];
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let end = rest
                    .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\''))
                    .unwrap_or(rest.len());
                out.push((Tok::Ident(rest[..end].to_string()), line_no));
                rest = &rest[end..];
                continue;
            }
            for (text, sym) in SYMBOLS {
                if let Some(r) = rest.strip_prefix(text) {
                    out.push((Tok::Sym(sym), line_no));
                    rest = r;
                    continue 'outer;
                }
            }
            return Err(ShapeError::Parse {
                line: line_no,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

/// Integer index expressions inside `v[...]` and `exists` ranges.
#[derive(Clone, Debug)]
enum Index {
    Num(i64),
    Var(String),
    Add(Box<Index>, Box<Index>),
    Sub(Box<Index>, Box<Index>),
}

#[derive(Clone, Debug)]
enum STerm {
    Zero,
    One,
    Name(String),
    Indexed(String, Index),
    Meet(Box<STerm>, Box<STerm>),
    Join(Box<STerm>, Box<STerm>),
}

#[derive(Clone, Debug)]
enum SFormula {
    Top,
    Bot,
    /// A chain `t0 r1 t1 r2 t2 …`, read as the conjunction of its links.
    Rel(Vec<STerm>, Vec<&'static str>),
    And(Box<SFormula>, Box<SFormula>),
    Or(Box<SFormula>, Box<SFormula>),
    Exists(String, Index, Index, Box<SFormula>),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const KEYWORDS: &[&str] = &[
    "sequent", "vars", "hyp", "goal", "chain", "expect", "exists", "in", "true", "false",
];

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(1, |(_, l)| *l)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ShapeError> {
        Err(ShapeError::Parse {
            line: self.line(),
            message: message.into(),
        })
    }

    fn sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ShapeError> {
        if self.sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`"))
        }
    }

    fn keyword(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(t)) if t == k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ShapeError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("expected an identifier"),
        }
    }

    fn number(&mut self) -> Result<i64, ShapeError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.error("expected a number"),
        }
    }

    fn index_atom(&mut self) -> Result<Index, ShapeError> {
        match self.peek().cloned() {
            Some(Tok::Num(_)) => Ok(Index::Num(self.number()?)),
            Some(Tok::Ident(_)) => Ok(Index::Var(self.ident()?)),
            _ if self.sym("(") => {
                let i = self.index()?;
                self.expect_sym(")")?;
                Ok(i)
            }
            _ => self.error("expected an index"),
        }
    }

    fn index(&mut self) -> Result<Index, ShapeError> {
        let mut i = self.index_atom()?;
        loop {
            if self.sym("+") {
                i = Index::Add(Box::new(i), Box::new(self.index_atom()?));
            } else if self.sym("-") {
                i = Index::Sub(Box::new(i), Box::new(self.index_atom()?));
            } else {
                return Ok(i);
            }
        }
    }

    fn primary(&mut self) -> Result<STerm, ShapeError> {
        match self.peek().cloned() {
            Some(Tok::Num(0)) => {
                self.pos += 1;
                Ok(STerm::Zero)
            }
            Some(Tok::Num(1)) => {
                self.pos += 1;
                Ok(STerm::One)
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                if self.sym("[") {
                    let i = self.index()?;
                    self.expect_sym("]")?;
                    Ok(STerm::Indexed(name, i))
                } else {
                    Ok(STerm::Name(name))
                }
            }
            _ if self.sym("(") => {
                let t = self.term()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => self.error("expected an interval term"),
        }
    }

    fn term(&mut self) -> Result<STerm, ShapeError> {
        let mut t = self.meet()?;
        while self.sym("\\/") {
            t = STerm::Join(Box::new(t), Box::new(self.meet()?));
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<STerm, ShapeError> {
        let mut t = self.primary()?;
        while self.sym("/\\") {
            t = STerm::Meet(Box::new(t), Box::new(self.primary()?));
        }
        Ok(t)
    }

    fn relation(&mut self) -> Option<&'static str> {
        ["<=", ">=", "="].into_iter().find(|r| self.sym(r))
    }

    fn atom(&mut self) -> Result<SFormula, ShapeError> {
        let mut terms = vec![self.primary()?];
        let mut rels = Vec::new();
        while let Some(r) = self.relation() {
            rels.push(r);
            terms.push(self.primary()?);
        }
        if rels.is_empty() {
            return self.error("expected `<=`, `>=` or `=` (parenthesise compound terms)");
        }
        Ok(SFormula::Rel(terms, rels))
    }

    fn formula(&mut self) -> Result<SFormula, ShapeError> {
        let mut f = self.conj()?;
        while self.sym("\\/") {
            f = SFormula::Or(Box::new(f), Box::new(self.conj()?));
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<SFormula, ShapeError> {
        let mut f = self.unit()?;
        while self.sym("/\\") {
            f = SFormula::And(Box::new(f), Box::new(self.unit()?));
        }
        Ok(f)
    }

    fn unit(&mut self) -> Result<SFormula, ShapeError> {
        if self.keyword("true") {
            return Ok(SFormula::Top);
        }
        if self.keyword("false") {
            return Ok(SFormula::Bot);
        }
        if self.keyword("exists") {
            let k = self.ident()?;
            if !self.keyword("in") {
                return self.error("expected `in`");
            }
            let lo = self.index()?;
            self.expect_sym("..")?;
            let hi = self.index()?;
            self.expect_sym(".")?;
            let body = self.formula()?;
            return Ok(SFormula::Exists(k, lo, hi, Box::new(body)));
        }
        if matches!(self.peek(), Some(Tok::Sym("("))) {
            let save = self.pos;
            self.pos += 1;
            if let Ok(f) = self.formula() {
                if self.sym(")") && self.relation().is_none() {
                    return Ok(f);
                }
            }
            self.pos = save;
        }
        self.atom()
    }
}

/// A `chain v n` family: `v[0] = 1`, `v[m] = vm` for `1 ≤ m ≤ n`, and `0` beyond.
struct Family {
    name: String,
    len: i64,
}

struct Resolver<'a> {
    families: &'a [Family],
    ints: Vec<(String, i64)>,
    line: usize,
}

impl Resolver<'_> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, ShapeError> {
        Err(ShapeError::Parse {
            line: self.line,
            message: message.into(),
        })
    }

    fn index(&self, i: &Index) -> Result<i64, ShapeError> {
        match i {
            Index::Num(n) => Ok(*n),
            Index::Var(v) => match self.ints.iter().rev().find(|(n, _)| n == v) {
                Some((_, k)) => Ok(*k),
                None => self.error(format!("unbound index variable `{v}`")),
            },
            Index::Add(a, b) => Ok(self.index(a)? + self.index(b)?),
            Index::Sub(a, b) => Ok(self.index(a)? - self.index(b)?),
        }
    }

    fn term(&self, t: &STerm) -> Result<LatTerm, ShapeError> {
        Ok(match t {
            STerm::Zero => LatTerm::Zero,
            STerm::One => LatTerm::One,
            STerm::Name(n) => {
                if self.ints.iter().any(|(k, _)| k == n) {
                    return self.error(format!("index variable `{n}` used as an interval term"));
                }
                LatTerm::Gen(n.clone())
            }
            STerm::Indexed(n, i) => {
                let m = self.index(i)?;
                let Some(fam) = self.families.iter().find(|f| &f.name == n) else {
                    return self.error(format!("`{n}` is not a chain"));
                };
                if m < 0 {
                    return self.error(format!("negative index {n}[{m}]"));
                }
                if m == 0 {
                    LatTerm::One
                } else if m <= fam.len {
                    LatTerm::Gen(format!("{n}{m}"))
                } else {
                    LatTerm::Zero
                }
            }
            STerm::Meet(a, b) => LatTerm::meet(self.term(a)?, self.term(b)?),
            STerm::Join(a, b) => LatTerm::join(self.term(a)?, self.term(b)?),
        })
    }

    fn atoms(&self, terms: &[STerm], rels: &[&str]) -> Result<Vec<Atom>, ShapeError> {
        let terms = terms.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
        Ok(rels
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let (a, b) = (terms[i].clone(), terms[i + 1].clone());
                match *r {
                    "<=" => Atom::Le(a, b),
                    ">=" => Atom::Le(b, a),
                    _ => Atom::Eq(a, b),
                }
            })
            .collect())
    }

    fn formula(&mut self, f: &SFormula) -> Result<Formula, ShapeError> {
        Ok(match f {
            SFormula::Top => Formula::Top,
            SFormula::Bot => Formula::Bot,
            SFormula::Rel(terms, rels) => self
                .atoms(terms, rels)?
                .into_iter()
                .map(Formula::Atom)
                .reduce(Formula::and)
                .expect("at least one relation"),
            SFormula::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            SFormula::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            SFormula::Exists(k, lo, hi, body) => {
                let (lo, hi) = (self.index(lo)?, self.index(hi)?);
                let mut out = None;
                for n in lo..=hi {
                    self.ints.push((k.clone(), n));
                    let f = self.formula(body);
                    self.ints.pop();
                    let f = f?;
                    out = Some(match out {
                        None => f,
                        Some(acc) => Formula::or(acc, f),
                    });
                }
                out.unwrap_or(Formula::Bot)
            }
        })
    }
}

/// Parse a sequent file. Without `sequent NAME { … }` blocks the whole file
/// is one sequent called `default_name`.
pub fn parse_sequents(src: &str, default_name: &str) -> Result<Vec<Sequent>, ShapeError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let mut out = Vec::new();
    if matches!(p.peek(), Some(Tok::Ident(s)) if s == "sequent") {
        while p.keyword("sequent") {
            let name = p.ident()?;
            p.expect_sym("{")?;
            out.push(parse_body(&mut p, &name, true)?);
            p.expect_sym("}")?;
        }
        if p.peek().is_some() {
            return p.error("expected `sequent`");
        }
    } else if p.peek().is_some() {
        out.push(parse_body(&mut p, default_name, false)?);
        if p.peek().is_some() {
            return p.error("unexpected input");
        }
    }
    let mut names: Vec<&str> = Vec::new();
    for s in &out {
        if names.contains(&s.name.as_str()) {
            return Err(ShapeError::Parse {
                line: 1,
                message: format!("sequent `{}` defined twice", s.name),
            });
        }
        names.push(&s.name);
    }
    Ok(out)
}

fn parse_body(p: &mut Parser, name: &str, in_block: bool) -> Result<Sequent, ShapeError> {
    let mut vars: Vec<String> = Vec::new();
    let mut families = Vec::new();
    let mut hyps = Vec::new();
    let mut goal = None;
    let mut expect = Vec::new();
    let declare = |vars: &mut Vec<String>, v: String, p: &Parser| {
        if vars.contains(&v) {
            return p.error(format!("variable `{v}` declared twice"));
        }
        vars.push(v);
        Ok(())
    };
    loop {
        match p.peek() {
            None => break,
            Some(Tok::Sym("}")) if in_block => break,
            _ => {}
        }
        let line = p.line();
        if p.keyword("vars") {
            while matches!(p.peek(), Some(Tok::Ident(_))) {
                let v = p.ident()?;
                declare(&mut vars, v, p)?;
            }
        } else if p.keyword("chain") {
            let v = p.ident()?;
            let n = p.number()?;
            for m in 1..=n {
                declare(&mut vars, format!("{v}{m}"), p)?;
            }
            for m in 1..n {
                hyps.push((
                    line,
                    SFormula::Rel(
                        vec![
                            STerm::Indexed(v.clone(), Index::Num(m + 1)),
                            STerm::Indexed(v.clone(), Index::Num(m)),
                        ],
                        vec!["<="],
                    ),
                ));
            }
            families.push(Family { name: v, len: n });
        } else if p.keyword("hyp") {
            loop {
                hyps.push((line, p.atom()?));
                if !p.sym(",") {
                    break;
                }
            }
        } else if p.keyword("goal") {
            if goal.is_some() {
                return p.error("more than one goal");
            }
            goal = Some((line, p.formula()?));
        } else if p.keyword("expect") {
            let sem = if p.keyword("simplicial") {
                Semantics::Simplicial
            } else if p.keyword("cubical") {
                Semantics::Cubical
            } else {
                return p.error("expected `simplicial` or `cubical`");
            };
            let want = if p.keyword("valid") {
                true
            } else if p.keyword("invalid") {
                false
            } else {
                return p.error("expected `valid` or `invalid`");
            };
            expect.push((sem, want));
        } else {
            return p.error("expected `vars`, `chain`, `hyp`, `goal` or `expect`");
        }
        p.expect_sym(";")?;
    }
    let Some((goal_line, goal)) = goal else {
        return p.error(format!("sequent `{name}` has no goal"));
    };
    let mut r = Resolver {
        families: &families,
        ints: Vec::new(),
        line: goal_line,
    };
    let goal = r.formula(&goal)?;
    let mut atoms = Vec::new();
    for (line, h) in &hyps {
        r.line = *line;
        let SFormula::Rel(terms, rels) = h else {
            unreachable!("hypotheses are relation chains")
        };
        atoms.extend(r.atoms(terms, rels)?);
    }
    let seq = Sequent {
        name: name.to_string(),
        vars,
        hyps: atoms,
        goal,
        expect,
    };
    check_scope(&seq)?;
    Ok(seq)
}
