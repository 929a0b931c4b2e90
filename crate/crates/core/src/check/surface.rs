//! Named surface syntax produced by the parser.

use crate::syntax::Span;

pub type BExpr = Box<Expr>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

/// A modality as written, parsed during elaboration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeAnn {
    pub text: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

/// `(x y :(μ/ν) A)`. The type may be absent only on λ binders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub names: Vec<Ident>,
    pub mode: Option<ModeAnn>,
    pub divisor: Option<ModeAnn>,
    pub ty: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Var(String),
    Univ(u32),
    Pi(Vec<Binder>, BExpr),
    Arrow(BExpr, BExpr),
    Sigma(Vec<Binder>, BExpr),
    Product(BExpr, BExpr),
    Lam(Vec<Binder>, BExpr),
    App(BExpr, Option<ModeAnn>, BExpr),
    Pair(BExpr, BExpr),
    Fst(BExpr),
    Snd(BExpr),
    Eq(BExpr, BExpr),
    IdTy(BExpr, BExpr, BExpr),
    Refl,
    J {
        y: Ident,
        p: Ident,
        motive: BExpr,
        base: BExpr,
        target: BExpr,
    },
    Modal(ModeAnn, BExpr),
    Mod(ModeAnn, BExpr),
    LetMod {
        outer: Option<ModeAnn>,
        inner: ModeAnn,
        x: Ident,
        scrutinee: BExpr,
        y: Ident,
        motive: BExpr,
        body: BExpr,
    },
    Bool,
    True,
    False,
    BoolRec {
        x: Ident,
        motive: BExpr,
        on_true: BExpr,
        on_false: BExpr,
        scrutinee: BExpr,
    },
    Nat,
    Zero,
    Succ(BExpr),
    NatRec {
        x: Ident,
        motive: BExpr,
        zero: BExpr,
        n: Ident,
        ih: Ident,
        succ: BExpr,
        scrutinee: BExpr,
    },
    Unit,
    Star,
    Empty,
    Absurd(BExpr, BExpr),
    Ann(BExpr, BExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceDecl {
    pub name: Ident,
    pub params: Vec<Binder>,
    pub ty: Expr,
    /// `None` for postulates.
    pub body: Option<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Decl(Box<SurfaceDecl>),
    Import(String, Span),
}

pub const KEYWORDS: &[&str] = &[
    "def",
    "postulate",
    "import",
    "fun",
    "let",
    "mod",
    "in",
    "return",
    "the",
    "J",
    "boolrec",
    "natrec",
    "absurd",
    "fst",
    "snd",
    "suc",
    "refl",
    "Bool",
    "true",
    "false",
    "Nat",
    "zero",
    "Unit",
    "tt",
    "Empty",
    "Id",
    "U",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s) || universe_level(s).is_some()
}

/// `U0`, `U1`, ... as universe names.
pub fn universe_level(s: &str) -> Option<u32> {
    let digits = s.strip_prefix('U')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}
