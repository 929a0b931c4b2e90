//! Recursive-descent parser for surface files, terms and contexts.

use super::lexer::{lex, Tok, Token};
use super::surface::*;
use super::{CheckError, ErrorKind};
use crate::syntax::Span;

type PResult<T> = Result<T, CheckError>;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn parse_error(span: Span, message: String) -> CheckError {
    CheckError::new(ErrorKind::Parse, "parse", Some(span), message)
}

/// Parse a whole file.
pub fn parse_file(src: &str) -> PResult<Vec<Item>> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        items.push(p.item()?);
    }
    Ok(items)
}

/// Parse a single term.
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

/// Parse a comma-separated context such as `x :(glo/sha) A, y : B`.
pub fn parse_context(src: &str) -> PResult<Vec<Binder>> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        if p.peek() == &Tok::LParen {
            out.push(p.group(true)?);
        } else {
            out.push(p.binder_body(true)?);
        }
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect(Tok::Eof)?;
    Ok(out)
}

impl Parser {
    pub fn new(src: &str) -> PResult<Parser> {
        let toks = lex(src).map_err(|e| parse_error(e.span, e.message))?;
        Ok(Parser { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        Err(parse_error(
            self.span(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        ))
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if self.peek() == &t {
            Ok(self.bump().span)
        } else {
            self.unexpected(&t.describe())
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_keyword(&name) => {
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn is_plain_ident(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if !is_keyword(s))
    }

    fn item(&mut self) -> PResult<Item> {
        let start = self.span().start;
        if self.eat_kw("import") {
            return match self.peek().clone() {
                Tok::Str(s) => {
                    self.bump();
                    Ok(Item::Import(s, Span::new(start, self.prev_end())))
                }
                _ => self.unexpected("a file name in quotes"),
            };
        }
        let is_def = if self.eat_kw("def") {
            true
        } else if self.eat_kw("postulate") {
            false
        } else {
            return self.unexpected("`def`, `postulate` or `import`");
        };
        let name = self.ident()?;
        let mut params = Vec::new();
        while self.peek() == &Tok::LParen {
            params.push(self.group(false)?);
        }
        self.expect(Tok::Colon)?;
        let ty = self.expr()?;
        let body = if is_def {
            self.expect(Tok::ColonEq)?;
            Some(self.expr()?)
        } else {
            None
        };
        Ok(Item::Decl(Box::new(SurfaceDecl {
            name,
            params,
            ty,
            body,
            span: Span::new(start, self.prev_end()),
        })))
    }

    /// Modality text up to (not including) one of `stops`.
    fn mode_ann(&mut self, stops: &[Tok]) -> PResult<ModeAnn> {
        let start = self.span().start;
        let mut text = String::new();
        while !stops.contains(self.peek()) {
            match self.bump().tok {
                Tok::Ident(s) => text.push_str(&s),
                Tok::Compose | Tok::Dot => text.push('∘'),
                Tok::Eof => return self.unexpected("a modality"),
                other => {
                    return Err(parse_error(
                        self.toks[self.pos - 1].span,
                        format!("unexpected {} in modality", other.describe()),
                    ))
                }
            }
        }
        Ok(ModeAnn {
            text,
            span: Span::new(start, self.prev_end().max(start)),
        })
    }

    /// After the names of a binder: `: A` or `:(μ[/ν]) [A]`.
    fn binder_tail(&mut self, names: Vec<Ident>, allow_division: bool, closing: &[Tok]) -> PResult<Binder> {
        let mut b = Binder {
            names,
            mode: None,
            divisor: None,
            ty: None,
        };
        if self.eat(&Tok::ColonParen) {
            b.mode = Some(self.mode_ann(&[Tok::RParen, Tok::Slash])?);
            if self.peek() == &Tok::Slash {
                let slash = self.bump().span;
                if !allow_division {
                    return Err(parse_error(
                        slash,
                        "a division `μ/ν` may only annotate a context entry".into(),
                    ));
                }
                b.divisor = Some(self.mode_ann(&[Tok::RParen])?);
            }
            self.expect(Tok::RParen)?;
            if !closing.contains(self.peek()) {
                b.ty = Some(self.expr()?);
            }
        } else {
            self.expect(Tok::Colon)?;
            b.ty = Some(self.expr()?);
        }
        Ok(b)
    }

    fn binder_body(&mut self, allow_division: bool) -> PResult<Binder> {
        let mut names = vec![self.ident()?];
        while self.is_plain_ident(0) {
            names.push(self.ident()?);
        }
        let b = self.binder_tail(names, allow_division, &[Tok::Comma, Tok::Eof])?;
        if b.ty.is_none() {
            return self.unexpected("a type");
        }
        Ok(b)
    }

    /// `(x y : A)` or `(x :(μ) A)`.
    fn group(&mut self, allow_division: bool) -> PResult<Binder> {
        self.expect(Tok::LParen)?;
        let mut names = vec![self.ident()?];
        while self.is_plain_ident(0) {
            names.push(self.ident()?);
        }
        let b = self.binder_tail(names, allow_division, &[Tok::RParen])?;
        self.expect(Tok::RParen)?;
        if b.ty.is_none() {
            return self.unexpected("a type in the binder");
        }
        Ok(b)
    }

    /// Whether a `(` starts a binder group: `( x y ... :`.
    fn at_group(&self) -> bool {
        if self.peek() != &Tok::LParen {
            return false;
        }
        let mut k = 1;
        while self.is_plain_ident(k) {
            k += 1;
        }
        k > 1 && matches!(self.peek_at(k), Tok::Colon | Tok::ColonParen)
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let start = self.span().start;
        if self.peek() == &Tok::Lambda || self.is_kw("fun") {
            self.bump();
            return self.lambda(start);
        }
        if self.is_kw("let") {
            return self.let_mod(start);
        }
        if self.eat(&Tok::Sigma) {
            let mut groups = Vec::new();
            while self.peek() == &Tok::LParen {
                groups.push(self.group(false)?);
            }
            if groups.is_empty() {
                return self.unexpected("a binder group after `Σ`");
            }
            if !self.eat(&Tok::Comma) {
                self.expect(Tok::Dot)?;
            }
            let body = self.expr()?;
            return Ok(self.mk(start, ExprKind::Sigma(groups, Box::new(body))));
        }
        if self.at_group() {
            let mut groups = Vec::new();
            while self.at_group() {
                groups.push(self.group(false)?);
            }
            return if self.eat(&Tok::Arrow) {
                let body = self.expr()?;
                Ok(self.mk(start, ExprKind::Pi(groups, Box::new(body))))
            } else if self.eat(&Tok::Times) {
                let body = self.expr()?;
                Ok(self.mk(start, ExprKind::Sigma(groups, Box::new(body))))
            } else {
                self.unexpected("`→` or `×` after a binder")
            };
        }
        let lhs = self.product()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.expr()?;
            return Ok(self.mk(start, ExprKind::Arrow(Box::new(lhs), Box::new(rhs))));
        }
        Ok(lhs)
    }

    fn mk(&self, start: usize, kind: ExprKind) -> Expr {
        Expr {
            kind,
            span: Span::new(start, self.prev_end()),
        }
    }

    fn lambda(&mut self, start: usize) -> PResult<Expr> {
        let mut binders = Vec::new();
        loop {
            if self.peek() == &Tok::LParen {
                self.bump();
                let mut names = vec![self.ident()?];
                while self.is_plain_ident(0) {
                    names.push(self.ident()?);
                }
                let b = if self.peek() == &Tok::RParen {
                    Binder {
                        names,
                        mode: None,
                        divisor: None,
                        ty: None,
                    }
                } else {
                    self.binder_tail(names, false, &[Tok::RParen])?
                };
                self.expect(Tok::RParen)?;
                binders.push(b);
            } else if self.is_plain_ident(0) {
                let name = self.ident()?;
                binders.push(Binder {
                    names: vec![name],
                    mode: None,
                    divisor: None,
                    ty: None,
                });
            } else {
                break;
            }
        }
        if binders.is_empty() {
            return self.unexpected("a λ binder");
        }
        self.expect(Tok::Dot)?;
        let body = self.expr()?;
        Ok(self.mk(start, ExprKind::Lam(binders, Box::new(body))))
    }

    fn let_mod(&mut self, start: usize) -> PResult<Expr> {
        self.expect_kw("let")?;
        let outer = if self.eat(&Tok::LAngle) {
            let m = self.mode_ann(&[Tok::RAngle])?;
            self.expect(Tok::RAngle)?;
            Some(m)
        } else {
            None
        };
        self.expect_kw("mod")?;
        self.expect(Tok::LAngle)?;
        let inner = self.mode_ann(&[Tok::RAngle])?;
        self.expect(Tok::RAngle)?;
        let x = self.ident()?;
        self.expect(Tok::Eq)?;
        let scrutinee = self.expr()?;
        self.expect_kw("return")?;
        let y = self.ident()?;
        self.expect(Tok::Dot)?;
        let motive = self.expr()?;
        self.expect_kw("in")?;
        let body = self.expr()?;
        Ok(self.mk(
            start,
            ExprKind::LetMod {
                outer,
                inner,
                x,
                scrutinee: Box::new(scrutinee),
                y,
                motive: Box::new(motive),
                body: Box::new(body),
            },
        ))
    }

    fn product(&mut self) -> PResult<Expr> {
        let start = self.span().start;
        let lhs = self.equality()?;
        if self.eat(&Tok::Times) {
            let rhs = if self.at_group() { self.expr()? } else { self.product()? };
            return Ok(self.mk(start, ExprKind::Product(Box::new(lhs), Box::new(rhs))));
        }
        Ok(lhs)
    }

    fn equality(&mut self) -> PResult<Expr> {
        let start = self.span().start;
        let lhs = self.application()?;
        if self.eat(&Tok::Eq) {
            let rhs = self.application()?;
            return Ok(self.mk(start, ExprKind::Eq(Box::new(lhs), Box::new(rhs))));
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::LParen | Tok::LAngle => true,
            Tok::Ident(s) => !matches!(
                s.as_str(),
                "def" | "postulate" | "import" | "fun" | "let" | "in" | "return"
            ),
            _ => false,
        }
    }

    fn application(&mut self) -> PResult<Expr> {
        let start = self.span().start;
        let mut head = self.prefix()?;
        loop {
            if self.eat(&Tok::At) {
                let mode = if self.eat(&Tok::LParen) {
                    let m = self.mode_ann(&[Tok::RParen])?;
                    self.expect(Tok::RParen)?;
                    m
                } else {
                    let id = self.ident_any()?;
                    ModeAnn {
                        text: id.name,
                        span: id.span,
                    }
                };
                let arg = self.prefix()?;
                head = self.mk(start, ExprKind::App(Box::new(head), Some(mode), Box::new(arg)));
            } else if self.starts_atom() {
                let arg = self.prefix()?;
                head = self.mk(start, ExprKind::App(Box::new(head), None, Box::new(arg)));
            } else {
                return Ok(head);
            }
        }
    }

    fn ident_any(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => self.unexpected("an identifier"),
        }
    }

    /// An atom, or a prefix former applied to one atom.
    fn prefix(&mut self) -> PResult<Expr> {
        let start = self.span().start;
        let unary = |p: &mut Parser, f: fn(BExpr) -> ExprKind| -> PResult<Expr> {
            p.bump();
            let a = p.prefix()?;
            Ok(p.mk(start, f(Box::new(a))))
        };
        match self.peek() {
            Tok::Ident(s) if s == "fst" => unary(self, ExprKind::Fst),
            Tok::Ident(s) if s == "snd" => unary(self, ExprKind::Snd),
            Tok::Ident(s) if s == "suc" => unary(self, ExprKind::Succ),
            Tok::Ident(s) if s == "the" => {
                self.bump();
                let ty = self.prefix()?;
                let e = self.prefix()?;
                Ok(self.mk(start, ExprKind::Ann(Box::new(e), Box::new(ty))))
            }
            Tok::Ident(s) if s == "mod" => {
                self.bump();
                self.expect(Tok::LAngle)?;
                let m = self.mode_ann(&[Tok::RAngle])?;
                self.expect(Tok::RAngle)?;
                let e = self.prefix()?;
                Ok(self.mk(start, ExprKind::Mod(m, Box::new(e))))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if self.eat(&Tok::Comma) {
                    let b = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(self.mk(start, ExprKind::Pair(Box::new(e), Box::new(b))));
                }
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LAngle => {
                self.bump();
                let m = self.mode_ann(&[Tok::Bar])?;
                self.expect(Tok::Bar)?;
                let a = self.expr()?;
                self.expect(Tok::RAngle)?;
                Ok(self.mk(start, ExprKind::Modal(m, Box::new(a))))
            }
            Tok::Ident(s) => {
                if let Some(l) = universe_level(&s) {
                    self.bump();
                    return Ok(self.mk(start, ExprKind::Univ(l)));
                }
                let simple = match s.as_str() {
                    "U" => Some(ExprKind::Univ(0)),
                    "refl" => Some(ExprKind::Refl),
                    "Bool" => Some(ExprKind::Bool),
                    "true" => Some(ExprKind::True),
                    "false" => Some(ExprKind::False),
                    "Nat" => Some(ExprKind::Nat),
                    "zero" => Some(ExprKind::Zero),
                    "Unit" => Some(ExprKind::Unit),
                    "tt" => Some(ExprKind::Star),
                    "Empty" => Some(ExprKind::Empty),
                    _ => None,
                };
                if let Some(kind) = simple {
                    self.bump();
                    return Ok(self.mk(start, kind));
                }
                match s.as_str() {
                    "J" => self.j(start),
                    "boolrec" => self.bool_rec(start),
                    "natrec" => self.nat_rec(start),
                    "absurd" => {
                        self.bump();
                        self.expect(Tok::LParen)?;
                        let motive = self.expr()?;
                        self.expect(Tok::Comma)?;
                        let e = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(self.mk(start, ExprKind::Absurd(Box::new(motive), Box::new(e))))
                    }
                    "Id" => {
                        self.bump();
                        self.expect(Tok::LParen)?;
                        let ty = self.expr()?;
                        self.expect(Tok::Comma)?;
                        let a = self.expr()?;
                        self.expect(Tok::Comma)?;
                        let b = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(self.mk(start, ExprKind::IdTy(Box::new(ty), Box::new(a), Box::new(b))))
                    }
                    _ if is_keyword(&s) => self.unexpected("a term"),
                    _ => {
                        self.bump();
                        Ok(self.mk(start, ExprKind::Var(s)))
                    }
                }
            }
            _ => self.unexpected("a term"),
        }
    }

    /// `x. M` inside an eliminator.
    fn motive(&mut self, arity: usize) -> PResult<(Vec<Ident>, Expr)> {
        let mut names = Vec::new();
        for _ in 0..arity {
            names.push(self.ident()?);
        }
        self.expect(Tok::Dot)?;
        Ok((names, self.expr()?))
    }

    fn j(&mut self, start: usize) -> PResult<Expr> {
        self.bump();
        self.expect(Tok::LParen)?;
        let (mut names, motive) = self.motive(2)?;
        self.expect(Tok::Comma)?;
        let base = self.expr()?;
        self.expect(Tok::Comma)?;
        let target = self.expr()?;
        self.expect(Tok::RParen)?;
        let p = names.pop().unwrap();
        let y = names.pop().unwrap();
        Ok(self.mk(
            start,
            ExprKind::J {
                y,
                p,
                motive: Box::new(motive),
                base: Box::new(base),
                target: Box::new(target),
            },
        ))
    }

    fn bool_rec(&mut self, start: usize) -> PResult<Expr> {
        self.bump();
        self.expect(Tok::LParen)?;
        let (mut names, motive) = self.motive(1)?;
        self.expect(Tok::Comma)?;
        let on_true = self.expr()?;
        self.expect(Tok::Comma)?;
        let on_false = self.expr()?;
        self.expect(Tok::Comma)?;
        let scrutinee = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(self.mk(
            start,
            ExprKind::BoolRec {
                x: names.pop().unwrap(),
                motive: Box::new(motive),
                on_true: Box::new(on_true),
                on_false: Box::new(on_false),
                scrutinee: Box::new(scrutinee),
            },
        ))
    }

    fn nat_rec(&mut self, start: usize) -> PResult<Expr> {
        self.bump();
        self.expect(Tok::LParen)?;
        let (mut xs, motive) = self.motive(1)?;
        self.expect(Tok::Comma)?;
        let zero = self.expr()?;
        self.expect(Tok::Comma)?;
        let (mut ns, succ) = self.motive(2)?;
        self.expect(Tok::Comma)?;
        let scrutinee = self.expr()?;
        self.expect(Tok::RParen)?;
        let ih = ns.pop().unwrap();
        let n = ns.pop().unwrap();
        Ok(self.mk(
            start,
            ExprKind::NatRec {
                x: xs.pop().unwrap(),
                motive: Box::new(motive),
                zero: Box::new(zero),
                n,
                ih,
                succ: Box::new(succ),
                scrutinee: Box::new(scrutinee),
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(src: &str) -> ExprKind {
        parse_expr(src).unwrap().kind
    }

    #[test]
    fn arrows_associate_right() {
        match kind("A -> B -> C") {
            ExprKind::Arrow(_, rhs) => assert!(matches!(rhs.kind, ExprKind::Arrow(..))),
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn modal_pi() {
        match kind("(a :(glo) A) → A") {
            ExprKind::Pi(bs, _) => {
                assert_eq!(bs[0].mode.as_ref().unwrap().text, "glo");
                assert_eq!(bs[0].names[0].name, "a");
            }
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn parenthesised_expression_is_not_a_binder() {
        assert!(matches!(kind("(f x) -> A"), ExprKind::Arrow(..)));
        assert!(matches!(kind("(a, b)"), ExprKind::Pair(..)));
    }

    #[test]
    fn product_binds_tighter_than_arrow() {
        match kind("A × B → C") {
            ExprKind::Arrow(lhs, _) => assert!(matches!(lhs.kind, ExprKind::Product(..))),
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn equality_and_application() {
        match kind("meet i j = i") {
            ExprKind::Eq(lhs, _) => assert!(matches!(lhs.kind, ExprKind::App(..))),
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn modal_forms() {
        assert!(matches!(kind("⟨glo | A⟩"), ExprKind::Modal(..)));
        assert!(matches!(kind("<op∘sha| A>"), ExprKind::Modal(..)));
        assert!(matches!(kind("mod<glo> x"), ExprKind::Mod(..)));
        assert!(matches!(
            kind("let mod⟨glo⟩ x = e return y. B in x"),
            ExprKind::LetMod { outer: None, .. }
        ));
        assert!(matches!(kind("f @glo x"), ExprKind::App(_, Some(_), _)));
    }

    #[test]
    fn division_only_in_contexts() {
        assert!(parse_expr("(x :(glo/sha) A) -> A").is_err());
        let ctx = parse_context("x :(glo/sha) A, y : B").unwrap();
        assert_eq!(ctx.len(), 2);
        assert_eq!(ctx[0].divisor.as_ref().unwrap().text, "sha");
    }

    #[test]
    fn declarations() {
        let items = parse_file("import \"a.ttt\"\npostulate A : U\ndef id (x : A) : A := x\n").unwrap();
        assert_eq!(items.len(), 3);
        match &items[2] {
            Item::Decl(d) => {
                assert_eq!(d.name.name, "id");
                assert_eq!(d.params.len(), 1);
                assert!(d.body.is_some());
            }
            i => panic!("{i:?}"),
        }
    }

    #[test]
    fn errors_carry_spans() {
        let e = parse_expr("f (x").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Parse);
        assert!(e.span.is_some());
    }
}
