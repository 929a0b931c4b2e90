//! Name resolution and desugaring from surface syntax to core terms.

use std::rc::Rc;

use super::surface::{Binder, Expr, ExprKind, Ident, ModeAnn, SurfaceDecl};
use super::{CheckError, ErrorKind};
use crate::modality::{compose, Modality};
use crate::syntax::{Context, Declaration, RcTerm, Span, Term};

type EResult<T> = Result<T, CheckError>;

/// Names in scope: local binders (innermost last) and a predicate for globals.
pub struct Scope<'a> {
    pub locals: Vec<String>,
    pub is_global: &'a dyn Fn(&str) -> bool,
}

impl<'a> Scope<'a> {
    pub fn new(is_global: &'a dyn Fn(&str) -> bool) -> Self {
        Scope {
            locals: Vec::new(),
            is_global,
        }
    }
}

/// Elaborate a closed surface term.
pub fn elaborate(scope: &mut Scope<'_>, e: &Expr) -> EResult<RcTerm> {
    expr(scope, e)
}

fn mode(ann: &ModeAnn) -> EResult<Modality> {
    ann.text
        .parse()
        .map_err(|err| CheckError::new(ErrorKind::BadAnnotation, "modality", Some(ann.span), format!("{err}")))
}

fn opt_mode(ann: &Option<ModeAnn>) -> EResult<Modality> {
    ann.as_ref().map_or(Ok(Modality::Id), mode)
}

fn loc(span: Span, t: Term) -> RcTerm {
    Rc::new(Term::Loc(span, Rc::new(t)))
}

fn named(name: &Ident, body: RcTerm) -> RcTerm {
    Rc::new(Term::Named(name.name.as_str().into(), body))
}

fn under<T>(scope: &mut Scope<'_>, names: &[&Ident], f: impl FnOnce(&mut Scope<'_>) -> EResult<T>) -> EResult<T> {
    for n in names {
        scope.locals.push(n.name.clone());
    }
    let r = f(scope);
    for _ in names {
        scope.locals.pop();
    }
    r
}

fn anonymous<T>(scope: &mut Scope<'_>, f: impl FnOnce(&mut Scope<'_>) -> EResult<T>) -> EResult<T> {
    // an empty name can never be referenced
    scope.locals.push(String::new());
    let r = f(scope);
    scope.locals.pop();
    r
}

fn no_division(b: &Binder) -> EResult<()> {
    match &b.divisor {
        Some(d) => Err(CheckError::new(
            ErrorKind::BadAnnotation,
            "binder",
            Some(d.span),
            "a division `μ/ν` may only annotate a context entry".into(),
        )),
        None => Ok(()),
    }
}

/// Flatten binder groups into (name, mode, type) triples.
fn flatten(groups: &[Binder]) -> EResult<Vec<(&Ident, Modality, Option<&Expr>)>> {
    let mut out = Vec::new();
    for g in groups {
        no_division(g)?;
        let m = opt_mode(&g.mode)?;
        for n in &g.names {
            out.push((n, m, g.ty.as_ref()));
        }
    }
    Ok(out)
}

/// Build nested binders (Π, Σ or λ) over `binders`, elaborating each type
/// in the scope extended by the binders before it.
fn telescope(
    scope: &mut Scope<'_>,
    binders: &[(&Ident, Modality, Option<&Expr>)],
    body: &Expr,
    build: &dyn Fn(Modality, Option<RcTerm>, RcTerm, Span) -> EResult<RcTerm>,
) -> EResult<RcTerm> {
    match binders.split_first() {
        None => expr(scope, body),
        Some(((name, m, ty), rest)) => {
            let dom = match ty {
                Some(t) => Some(expr(scope, t)?),
                None => None,
            };
            let inner = named(name, under(scope, &[name], |s| telescope(s, rest, body, build))?);
            build(*m, dom, inner, name.span.merge(body.span))
        }
    }
}

fn expr(scope: &mut Scope<'_>, e: &Expr) -> EResult<RcTerm> {
    let sp = e.span;
    let t = match &e.kind {
        ExprKind::Var(name) => {
            if let Some(pos) = scope.locals.iter().rposition(|n| n == name) {
                Term::Var(scope.locals.len() - 1 - pos)
            } else if (scope.is_global)(name) {
                Term::Const {
                    name: name.as_str().into(),
                    spine: Vec::new(),
                }
            } else {
                return Err(CheckError::new(
                    ErrorKind::UnboundName,
                    "variable",
                    Some(sp),
                    format!("unbound name `{name}`"),
                ));
            }
        }
        ExprKind::Univ(l) => Term::Univ(*l),
        ExprKind::Pi(groups, body) => {
            let bs = flatten(groups)?;
            return telescope(scope, &bs, body, &|m, dom, cod, s| {
                Ok(loc(s, Term::Pi(m, dom.expect("Π binders carry types"), cod)))
            })
            .map(|t| relocate(t, sp));
        }
        ExprKind::Sigma(groups, body) => {
            let bs = flatten(groups)?;
            if let Some((_, m, _)) = bs.iter().find(|b| b.1 != Modality::Id) {
                return Err(CheckError::new(
                    ErrorKind::BadAnnotation,
                    "sigma",
                    Some(sp),
                    format!("Σ binders cannot carry a modality (found {m})"),
                ));
            }
            return telescope(scope, &bs, body, &|_, dom, cod, s| {
                Ok(loc(s, Term::Sigma(dom.expect("Σ binders carry types"), cod)))
            })
            .map(|t| relocate(t, sp));
        }
        ExprKind::Lam(groups, body) => {
            let bs = flatten(groups)?;
            let annotated: Vec<bool> = groups
                .iter()
                .flat_map(|g| g.names.iter().map(move |_| g.mode.is_some()))
                .collect();
            let t = telescope(scope, &bs, body, &|m, dom, b, s| {
                Ok(loc(
                    s,
                    Term::Lam {
                        mode: Some(m),
                        dom,
                        body: b,
                    },
                ))
            })?;
            return Ok(relocate(clear_unwritten_modes(t, &annotated), sp));
        }
        ExprKind::Arrow(a, b) => {
            let a = expr(scope, a)?;
            let b = anonymous(scope, |s| expr(s, b))?;
            Term::Pi(Modality::Id, a, b)
        }
        ExprKind::Product(a, b) => {
            let a = expr(scope, a)?;
            let b = anonymous(scope, |s| expr(s, b))?;
            Term::Sigma(a, b)
        }
        ExprKind::App(f, m, a) => Term::App {
            mode: match m {
                Some(m) => Some(mode(m)?),
                None => None,
            },
            fun: expr(scope, f)?,
            arg: expr(scope, a)?,
        },
        ExprKind::Pair(a, b) => Term::Pair(expr(scope, a)?, expr(scope, b)?),
        ExprKind::Fst(p) => Term::Fst(expr(scope, p)?),
        ExprKind::Snd(p) => Term::Snd(expr(scope, p)?),
        ExprKind::Eq(a, b) => Term::Id(Rc::new(Term::Hole), expr(scope, a)?, expr(scope, b)?),
        ExprKind::IdTy(t, a, b) => Term::Id(expr(scope, t)?, expr(scope, a)?, expr(scope, b)?),
        ExprKind::Refl => Term::Refl,
        ExprKind::J {
            y,
            p,
            motive,
            base,
            target,
        } => Term::J {
            motive: under(scope, &[y, p], |s| expr(s, motive))?,
            base: expr(scope, base)?,
            target: expr(scope, target)?,
        },
        ExprKind::Modal(m, a) => Term::Modal(mode(m)?, expr(scope, a)?),
        ExprKind::Mod(m, a) => Term::Mod(mode(m)?, expr(scope, a)?),
        ExprKind::LetMod {
            outer,
            inner,
            x,
            scrutinee,
            y,
            motive,
            body,
        } => Term::LetMod {
            outer: opt_mode(outer)?,
            inner: mode(inner)?,
            motive: named(y, under(scope, &[y], |s| expr(s, motive))?),
            scrutinee: expr(scope, scrutinee)?,
            body: named(x, under(scope, &[x], |s| expr(s, body))?),
        },
        ExprKind::Bool => Term::Bool,
        ExprKind::True => Term::True,
        ExprKind::False => Term::False,
        ExprKind::BoolRec {
            x,
            motive,
            on_true,
            on_false,
            scrutinee,
        } => Term::BoolRec {
            motive: named(x, under(scope, &[x], |s| expr(s, motive))?),
            on_true: expr(scope, on_true)?,
            on_false: expr(scope, on_false)?,
            scrutinee: expr(scope, scrutinee)?,
        },
        ExprKind::Nat => Term::Nat,
        ExprKind::Zero => Term::Zero,
        ExprKind::Succ(n) => Term::Succ(expr(scope, n)?),
        ExprKind::NatRec {
            x,
            motive,
            zero,
            n,
            ih,
            succ,
            scrutinee,
        } => Term::NatRec {
            motive: named(x, under(scope, &[x], |s| expr(s, motive))?),
            zero: expr(scope, zero)?,
            succ: under(scope, &[n, ih], |s| expr(s, succ))?,
            scrutinee: expr(scope, scrutinee)?,
        },
        ExprKind::Unit => Term::Unit,
        ExprKind::Star => Term::Star,
        ExprKind::Empty => Term::Empty,
        ExprKind::Absurd(motive, e) => Term::EmptyRec {
            motive: expr(scope, motive)?,
            scrutinee: expr(scope, e)?,
        },
        ExprKind::Ann(e, t) => Term::Ann(expr(scope, e)?, expr(scope, t)?),
    };
    Ok(loc(sp, t))
}

/// Give the outermost `Loc` the span of the whole surface node.
fn relocate(t: RcTerm, span: Span) -> RcTerm {
    match &*t {
        Term::Loc(_, inner) => Rc::new(Term::Loc(span, inner.clone())),
        _ => loc(span, (*t).clone()),
    }
}

/// λ binders written without a modality take it from the Π they check
/// against, so their mode is left open.
fn clear_unwritten_modes(t: RcTerm, annotated: &[bool]) -> RcTerm {
    let Some((first, rest)) = annotated.split_first() else {
        return t;
    };
    match &*t {
        Term::Loc(s, inner) => Rc::new(Term::Loc(*s, clear_unwritten_modes(inner.clone(), annotated))),
        Term::Named(n, inner) => Rc::new(Term::Named(n.clone(), clear_unwritten_modes(inner.clone(), annotated))),
        Term::Lam { mode, dom, body } => Rc::new(Term::Lam {
            mode: if *first { *mode } else { None },
            dom: dom.clone(),
            body: clear_unwritten_modes(body.clone(), rest),
        }),
        _ => t,
    }
}

/// Elaborate a declaration: parameters become Π binders on the type and λ
/// binders on the body.
pub fn elaborate_decl(scope: &mut Scope<'_>, d: &SurfaceDecl) -> EResult<Declaration> {
    let bs = flatten(&d.params)?;
    let ty = telescope(scope, &bs, &d.ty, &|m, dom, cod, s| {
        Ok(loc(s, Term::Pi(m, dom.expect("parameters carry types"), cod)))
    })?;
    let body = match &d.body {
        Some(b) => Some(telescope(scope, &bs, b, &|m, dom, body, s| {
            Ok(loc(
                s,
                Term::Lam {
                    mode: Some(m),
                    dom,
                    body,
                },
            ))
        })?),
        None => None,
    };
    let mut decl = match body {
        Some(b) => Declaration::definition(&d.name.name, ty, b),
        None => Declaration::postulate(&d.name.name, ty),
    };
    decl.span = d.span;
    Ok(decl)
}

/// Translate a context written with formal divisions `x :(μ/ν) A` into locks
/// and bindings. The divisor of an entry is the composite of all locks after
/// it, so the lock following entry `i` is the `λ` with `λ ∘ νᵢ₊₁ = νᵢ`
/// (no lock when `id` works).
pub fn elaborate_context(scope: &mut Scope<'_>, binders: &[Binder]) -> EResult<Context> {
    let mut flat = Vec::new();
    for b in binders {
        let m = opt_mode(&b.mode)?;
        let nu = opt_mode(&b.divisor)?;
        let ty = b.ty.as_ref().expect("context entries carry types");
        for n in &b.names {
            flat.push((n, m, nu, ty, b.divisor.as_ref().map_or(n.span, |d| d.span)));
        }
    }
    // locks after each entry, solved from the end
    let mut locks = vec![Modality::Id; flat.len()];
    let mut after = Modality::Id;
    for i in (0..flat.len()).rev() {
        let nu = flat[i].2;
        let lock = if compose(Modality::Id, after) == nu {
            Modality::Id
        } else {
            match Modality::ALL.into_iter().find(|l| compose(*l, after) == nu) {
                Some(l) => l,
                None => {
                    return Err(CheckError::new(
                        ErrorKind::BadAnnotation,
                        "division",
                        Some(flat[i].4),
                        format!(
                            "no lock after `{}` gives divisor {nu} given {after} for the entries after it",
                            flat[i].0.name
                        ),
                    ))
                }
            }
        };
        locks[i] = lock;
        after = nu;
    }
    let mut ctx = Context::new();
    let base = scope.locals.len();
    let mut result = Ok(());
    for (i, (n, m, _, ty, _)) in flat.iter().enumerate() {
        match expr(scope, ty) {
            Ok(t) => {
                ctx.bind(*m, t);
                if !locks[i].is_id() {
                    ctx.lock(locks[i]);
                }
                scope.locals.push(n.name.clone());
            }
            Err(e) => {
                result = Err(e);
                break;
            }
        }
    }
    scope.locals.truncate(base);
    result.map(|_| ctx)
}
