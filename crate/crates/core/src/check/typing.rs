//! Bidirectional type checking of core terms.
//!
//! Introduction forms are checked, eliminations inferred. The checker returns
//! the term with its gaps filled: application modalities, λ modalities and the
//! type of `a = b`.

use std::rc::Rc;

use super::pretty;
use super::signature::Signature;
use super::{CheckError, ErrorKind};
use crate::eval::{conv_ty, conv_val, eval, subtype, Closure, Env, Globals, Quoter, Val, Value};
use crate::modality::{compose, Modality};
use crate::syntax::{Arg, Context, DeclKind, Declaration, Entry, RcTerm, Span, Telescope, Term};

type TResult<T> = Result<T, CheckError>;

/// Top universe: `U3` has no type.
pub const TOP_UNIVERSE: u32 = 3;

/// Typing context: binding types as values, the variables themselves and
/// their display names.
#[derive(Default, Clone)]
pub struct Cx {
    tele: Telescope<Val>,
    env: Env,
    names: Vec<String>,
}

impl Cx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn depth(&self) -> usize {
        self.env.len()
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn telescope(&self) -> &Telescope<Val> {
        &self.tele
    }

    pub fn bind(&mut self, mode: Modality, ty: Val, name: String) -> Val {
        let v = Value::var(self.depth());
        self.tele.bind(mode, ty);
        self.env.push(v.clone());
        self.names.push(name);
        v
    }

    /// Show the innermost variable as `name`, primed if another variable
    /// already displays that way.
    pub fn rename_last(&mut self, name: &str) {
        let Some((_, outer)) = self.names.split_last() else {
            return;
        };
        let mut n = name.to_string();
        while outer.contains(&n) {
            n.push('\'');
        }
        *self.names.last_mut().expect("nonempty") = n;
    }

    pub fn lock(&mut self, m: Modality) {
        self.tele.lock(m);
    }

    pub fn pop(&mut self) {
        if let Some(Entry::Bind(..)) = self.tele.pop() {
            self.env.pop();
            self.names.pop();
        }
    }

    pub fn types(&self) -> Vec<Val> {
        self.tele
            .entries()
            .iter()
            .filter_map(|e| match e {
                Entry::Bind(_, t) => Some(t.clone()),
                Entry::Lock(_) => None,
            })
            .collect()
    }
}

pub struct Checker<'s> {
    pub sig: &'s Signature,
    pub cx: Cx,
    span: Option<Span>,
}

impl<'s> Checker<'s> {
    pub fn new(sig: &'s Signature) -> Self {
        Checker {
            sig,
            cx: Cx::new(),
            span: None,
        }
    }

    pub fn with_cx(sig: &'s Signature, cx: Cx) -> Self {
        Checker { sig, cx, span: None }
    }

    fn err<T>(&self, kind: ErrorKind, rule: &'static str, message: String) -> TResult<T> {
        Err(CheckError::new(kind, rule, self.span, message))
    }

    pub fn eval(&self, t: &RcTerm) -> Val {
        eval(self.sig, &self.cx.env, t)
    }

    pub fn quote_ty(&self, v: &Val) -> RcTerm {
        Quoter::new(self.sig, self.cx.types()).quote_ty(v)
    }

    pub fn quote(&self, ty: &Val, v: &Val) -> RcTerm {
        Quoter::new(self.sig, self.cx.types()).quote(ty, v)
    }

    pub fn show_ty(&self, v: &Val) -> String {
        pretty::term(self.cx.names(), &self.quote_ty(v))
    }

    fn show(&self, ty: &Val, v: &Val) -> String {
        pretty::term(self.cx.names(), &self.quote(ty, v))
    }

    fn fresh(&self) -> String {
        pretty::fresh_name(self.cx.names(), &[])
    }

    /// Run `f` in a context extended by one binding.
    fn under<T>(&mut self, mode: Modality, ty: Val, f: impl FnOnce(&mut Self, Val) -> TResult<T>) -> TResult<T> {
        let name = self.fresh();
        let x = self.cx.bind(mode, ty, name);
        let r = f(self, x);
        self.cx.pop();
        r
    }

    fn locked<T>(&mut self, mode: Modality, f: impl FnOnce(&mut Self) -> TResult<T>) -> TResult<T> {
        self.cx.lock(mode);
        let r = f(self);
        self.cx.pop();
        r
    }

    fn at<T>(&mut self, span: Span, f: impl FnOnce(&mut Self) -> TResult<T>) -> TResult<T> {
        let saved = self.span.replace(span);
        let r = f(self);
        self.span = saved;
        r
    }

    /// The universe level a type value inhabits.
    pub fn level_of(&mut self, v: &Val) -> u32 {
        let g = self.sig;
        match &**v {
            Value::Univ(l) => l + 1,
            Value::Pi(_, a, b) | Value::Sigma(a, b) => {
                let la = self.level_of(a);
                let lb = self
                    .under(Modality::Id, a.clone(), |c, x| Ok(c.level_of(&b.apply(g, x))))
                    .unwrap_or(0);
                la.max(lb)
            }
            Value::Id(a, _, _) | Value::Modal(_, a) => self.level_of(a),
            Value::Neutral(n) => {
                let (_, ty) = Quoter::new(g, self.cx.types()).quote_ne(n);
                match ty.as_deref() {
                    Some(Value::Univ(l)) => *l,
                    _ => 0,
                }
            }
            _ => 0,
        }
    }

    /// Check that `t` is a type; returns it with its universe level.
    pub fn check_type(&mut self, t: &RcTerm) -> TResult<(RcTerm, u32)> {
        let (t2, ty) = self.infer(t)?;
        match &*ty {
            Value::Univ(l) => Ok((t2, *l)),
            _ => self.err(
                ErrorKind::TypeMismatch,
                "type",
                format!("expected a type, found a term of type {}", self.show_ty(&ty)),
            ),
        }
    }

    pub fn check(&mut self, t: &RcTerm, ty: &Val) -> TResult<RcTerm> {
        let g = self.sig;
        match (&**t, &**ty) {
            (Term::Loc(sp, e), _) => self.at(*sp, |c| c.check(e, ty)),
            (Term::Named(n, e), _) => {
                self.cx.rename_last(n);
                self.check(e, ty)
            }
            (Term::Lam { mode, dom, body }, Value::Pi(m, a, b)) => {
                let m = *m;
                if let Some(lm) = mode {
                    if *lm != m {
                        return self.err(
                            ErrorKind::TypeMismatch,
                            "lam",
                            format!("λ binds at modality {lm} but the Π expects {m}"),
                        );
                    }
                }
                let dom = match dom {
                    Some(d) => {
                        let (d2, _) = self.locked(m, |c| c.check_type(d))?;
                        let dv = self.eval(&d2);
                        if !conv_ty(g, &self.cx.types(), &dv, a) {
                            return self.err(
                                ErrorKind::TypeMismatch,
                                "lam",
                                format!(
                                    "λ domain {} does not match the expected {}",
                                    self.show_ty(&dv),
                                    self.show_ty(a)
                                ),
                            );
                        }
                        Some(d2)
                    }
                    None => None,
                };
                let body = self.under(m, a.clone(), |c, x| c.check(body, &b.apply(g, x)))?;
                Ok(Rc::new(Term::Lam {
                    mode: Some(m),
                    dom,
                    body,
                }))
            }
            (Term::Lam { .. }, _) => self.err(
                ErrorKind::TypeMismatch,
                "lam",
                format!("a λ cannot have type {}", self.show_ty(ty)),
            ),
            (Term::Pair(x, y), Value::Sigma(a, b)) => {
                let x2 = self.check(x, a)?;
                let bty = b.apply(g, self.eval(&x2));
                let y2 = self.check(y, &bty)?;
                Ok(Rc::new(Term::Pair(x2, y2)))
            }
            (Term::Pair(..), _) => self.err(
                ErrorKind::TypeMismatch,
                "pair",
                format!("a pair cannot have type {}", self.show_ty(ty)),
            ),
            (Term::Refl, Value::Id(a, x, y)) => {
                if conv_val(g, &self.cx.types(), a, x, y) {
                    Ok(Rc::new(Term::Refl))
                } else {
                    self.err(
                        ErrorKind::TypeMismatch,
                        "refl",
                        format!(
                            "refl needs {} and {} to be definitionally equal",
                            self.show(a, x),
                            self.show(a, y)
                        ),
                    )
                }
            }
            (Term::Refl, _) => self.err(
                ErrorKind::TypeMismatch,
                "refl",
                format!("refl cannot have type {}", self.show_ty(ty)),
            ),
            (Term::Mod(m, e), Value::Modal(n, a)) => {
                if m != n {
                    return self.err(
                        ErrorKind::TypeMismatch,
                        "mod",
                        format!("mod⟨{m}⟩ cannot have type ⟨{n} | …⟩"),
                    );
                }
                let e2 = self.locked(*m, |c| c.check(e, a))?;
                Ok(Rc::new(Term::Mod(*m, e2)))
            }
            _ => {
                let (t2, found) = self.infer(t)?;
                if subtype(g, &mut self.cx.types(), &found, ty) {
                    Ok(t2)
                } else {
                    self.err(
                        ErrorKind::TypeMismatch,
                        "conversion",
                        format!("expected type {}, found {}", self.show_ty(ty), self.show_ty(&found)),
                    )
                }
            }
        }
    }

    /// Apply a function of type `fty` to `arg`.
    fn app(&mut self, mode: Option<Modality>, fty: &Val, arg: &RcTerm) -> TResult<(Modality, RcTerm, Val)> {
        match &**fty {
            Value::Pi(m, a, b) => {
                if let Some(given) = mode {
                    if given != *m {
                        return self.err(
                            ErrorKind::TypeMismatch,
                            "app",
                            format!("argument given at modality {given}, the function expects {m}"),
                        );
                    }
                }
                let m = *m;
                let arg2 = self.locked(m, |c| c.check(arg, a))?;
                let res = b.apply(self.sig, self.eval(&arg2));
                Ok((m, arg2, res))
            }
            _ => self.err(
                ErrorKind::NotAFunction,
                "app",
                format!("applying a term of non-function type {}", self.show_ty(fty)),
            ),
        }
    }

    pub fn infer(&mut self, t: &RcTerm) -> TResult<(RcTerm, Val)> {
        let g = self.sig;
        let univ = |l: u32| Rc::new(Value::Univ(l));
        match &**t {
            Term::Loc(sp, e) => self.at(*sp, |c| c.infer(e)),
            Term::Named(n, e) => {
                self.cx.rename_last(n);
                self.infer(e)
            }
            Term::Var(i) => {
                let info = match self.cx.tele.lookup(*i) {
                    Ok(info) => info,
                    Err(e) => return self.err(ErrorKind::OutOfRange, "var", e.to_string()),
                };
                if !info.mode.leq(info.locks) {
                    let name = self.cx.names[info.level].clone();
                    let (mode, locks) = (info.mode, info.locks);
                    return self.err(
                        ErrorKind::VariableLocked,
                        "var",
                        format!(
                            "`{name}` is bound at modality {mode} but used behind locks {locks}; {mode} ≤ {locks} does not hold"
                        ),
                    );
                }
                Ok((t.clone(), info.ty.clone()))
            }
            Term::Univ(l) => {
                if *l >= TOP_UNIVERSE {
                    self.err(
                        ErrorKind::UniverseError,
                        "univ",
                        format!("U{l} has no type; the hierarchy stops at U{TOP_UNIVERSE}"),
                    )
                } else {
                    Ok((t.clone(), univ(l + 1)))
                }
            }
            Term::Pi(m, a, b) => {
                let (a2, la) = self.locked(*m, |c| c.check_type(a))?;
                let av = self.eval(&a2);
                let (b2, lb) = self.under(*m, av, |c, _| c.check_type(b))?;
                Ok((Rc::new(Term::Pi(*m, a2, b2)), univ(la.max(lb))))
            }
            Term::Sigma(a, b) => {
                let (a2, la) = self.check_type(a)?;
                let av = self.eval(&a2);
                let (b2, lb) = self.under(Modality::Id, av, |c, _| c.check_type(b))?;
                Ok((Rc::new(Term::Sigma(a2, b2)), univ(la.max(lb))))
            }
            Term::Lam {
                mode,
                dom: Some(d),
                body,
            } => {
                let m = mode.unwrap_or(Modality::Id);
                let (d2, _) = self.locked(m, |c| c.check_type(d))?;
                let dv = self.eval(&d2);
                let (body2, cod) = self.under(m, dv.clone(), |c, _| {
                    let (b2, bty) = c.infer(body)?;
                    Ok((b2, c.quote_ty(&bty)))
                })?;
                let ty = Rc::new(Value::Pi(m, dv, Closure::new(&self.cx.env, &cod)));
                Ok((
                    Rc::new(Term::Lam {
                        mode: Some(m),
                        dom: Some(d2),
                        body: body2,
                    }),
                    ty,
                ))
            }
            Term::App { mode, fun, arg } => {
                let (f2, fty) = self.infer(fun)?;
                let (m, arg2, res) = self.app(*mode, &fty, arg)?;
                Ok((
                    Rc::new(Term::App {
                        mode: Some(m),
                        fun: f2,
                        arg: arg2,
                    }),
                    res,
                ))
            }
            Term::Const { name, spine } => {
                let Some(mut ty) = g.type_of(name) else {
                    return self.err(ErrorKind::UnboundName, "const", format!("unknown constant `{name}`"));
                };
                let mut args = Vec::new();
                for a in spine {
                    let (m, term, res) = self.app(a.mode, &ty, &a.term)?;
                    args.push(Arg { mode: Some(m), term });
                    ty = res;
                }
                Ok((
                    Rc::new(Term::Const {
                        name: name.clone(),
                        spine: args,
                    }),
                    ty,
                ))
            }
            Term::Pair(a, b) => {
                let (a2, aty) = self.infer(a)?;
                let (b2, bty) = self.infer(b)?;
                // non-dependent: the codomain ignores the new variable
                let cod = shift_up(&self.quote_ty(&bty));
                let ty = Rc::new(Value::Sigma(aty, Closure::new(&self.cx.env, &cod)));
                Ok((Rc::new(Term::Pair(a2, b2)), ty))
            }
            Term::Fst(p) | Term::Snd(p) => {
                let (p2, pty) = self.infer(p)?;
                let is_fst = matches!(&**t, Term::Fst(_));
                match &*pty {
                    Value::Sigma(a, b) => {
                        if is_fst {
                            Ok((Rc::new(Term::Fst(p2)), a.clone()))
                        } else {
                            let first = crate::eval::fst(self.eval(&p2));
                            Ok((Rc::new(Term::Snd(p2)), b.apply(g, first)))
                        }
                    }
                    _ => self.err(
                        ErrorKind::TypeMismatch,
                        if is_fst { "fst" } else { "snd" },
                        format!("projecting from a term of non-Σ type {}", self.show_ty(&pty)),
                    ),
                }
            }
            Term::Id(a, x, y) => {
                if let Term::Hole = &**a {
                    let (x2, aty) = self.infer(x)?;
                    let y2 = self.check(y, &aty)?;
                    let l = self.level_of(&aty);
                    let a2 = self.quote_ty(&aty);
                    Ok((Rc::new(Term::Id(a2, x2, y2)), univ(l)))
                } else {
                    let (a2, l) = self.check_type(a)?;
                    let av = self.eval(&a2);
                    let x2 = self.check(x, &av)?;
                    let y2 = self.check(y, &av)?;
                    Ok((Rc::new(Term::Id(a2, x2, y2)), univ(l)))
                }
            }
            Term::J { motive, base, target } => {
                let (t2, tty) = self.infer(target)?;
                let Value::Id(a, x, y) = &*tty else {
                    return self.err(
                        ErrorKind::TypeMismatch,
                        "J",
                        format!("J needs a path, found a term of type {}", self.show_ty(&tty)),
                    );
                };
                let (a, x, y) = (a.clone(), x.clone(), y.clone());
                let (m2, _) = self.under(Modality::Id, a.clone(), |c, yv| {
                    let pty = Rc::new(Value::Id(a.clone(), x.clone(), yv));
                    c.under(Modality::Id, pty, |c, _| c.check_type(motive))
                })?;
                let mc = Closure::new(&self.cx.env, &m2);
                let base2 = self.check(base, &mc.apply2(g, x, Rc::new(Value::Refl)))?;
                let res = mc.apply2(g, y, self.eval(&t2));
                Ok((
                    Rc::new(Term::J {
                        motive: m2,
                        base: base2,
                        target: t2,
                    }),
                    res,
                ))
            }
            Term::Modal(m, a) => {
                let (a2, l) = self.locked(*m, |c| c.check_type(a))?;
                Ok((Rc::new(Term::Modal(*m, a2)), univ(l)))
            }
            Term::Mod(m, e) => {
                let (e2, ety) = self.locked(*m, |c| c.infer(e))?;
                Ok((Rc::new(Term::Mod(*m, e2)), Rc::new(Value::Modal(*m, ety))))
            }
            Term::LetMod {
                outer,
                inner,
                motive,
                scrutinee,
                body,
            } => {
                let (nu, mu) = (*outer, *inner);
                let (s2, sty) = self.locked(nu, |c| c.infer(scrutinee))?;
                let a = match &*sty {
                    Value::Modal(m, a) if *m == mu => a.clone(),
                    _ => {
                        return self.err(
                            ErrorKind::TypeMismatch,
                            "let-mod",
                            format!(
                                "let mod⟨{mu}⟩ needs a scrutinee of type ⟨{mu} | …⟩, found {}",
                                self.show_ty(&sty)
                            ),
                        )
                    }
                };
                let (m2, _) = self.under(nu, sty.clone(), |c, _| c.check_type(motive))?;
                let mc = Closure::new(&self.cx.env, &m2);
                let body2 = self.under(compose(nu, mu), a, |c, x| {
                    let expected = mc.apply(g, Rc::new(Value::Mod(mu, x)));
                    c.check(body, &expected)
                })?;
                let res = mc.apply(g, self.eval(&s2));
                Ok((
                    Rc::new(Term::LetMod {
                        outer: nu,
                        inner: mu,
                        motive: m2,
                        scrutinee: s2,
                        body: body2,
                    }),
                    res,
                ))
            }
            Term::Bool | Term::Nat | Term::Unit | Term::Empty => Ok((t.clone(), univ(0))),
            Term::True | Term::False => Ok((t.clone(), Rc::new(Value::Bool))),
            Term::Zero => Ok((t.clone(), Rc::new(Value::Nat))),
            Term::Star => Ok((t.clone(), Rc::new(Value::Unit))),
            Term::Succ(n) => {
                let n2 = self.check(n, &Rc::new(Value::Nat))?;
                Ok((Rc::new(Term::Succ(n2)), Rc::new(Value::Nat)))
            }
            Term::BoolRec {
                motive,
                on_true,
                on_false,
                scrutinee,
            } => {
                let s2 = self.check(scrutinee, &Rc::new(Value::Bool))?;
                let (m2, _) = self.under(Modality::Id, Rc::new(Value::Bool), |c, _| c.check_type(motive))?;
                let mc = Closure::new(&self.cx.env, &m2);
                let t2 = self.check(on_true, &mc.apply(g, Rc::new(Value::True)))?;
                let f2 = self.check(on_false, &mc.apply(g, Rc::new(Value::False)))?;
                let res = mc.apply(g, self.eval(&s2));
                Ok((
                    Rc::new(Term::BoolRec {
                        motive: m2,
                        on_true: t2,
                        on_false: f2,
                        scrutinee: s2,
                    }),
                    res,
                ))
            }
            Term::NatRec {
                motive,
                zero,
                succ,
                scrutinee,
            } => {
                let nat = Rc::new(Value::Nat);
                let s2 = self.check(scrutinee, &nat)?;
                let (m2, _) = self.under(Modality::Id, nat.clone(), |c, _| c.check_type(motive))?;
                let mc = Closure::new(&self.cx.env, &m2);
                let z2 = self.check(zero, &mc.apply(g, Rc::new(Value::Zero)))?;
                let succ2 = self.under(Modality::Id, nat.clone(), |c, n| {
                    let ih = mc.apply(g, n.clone());
                    c.under(Modality::Id, ih, |c, _| {
                        c.check(succ, &mc.apply(g, Rc::new(Value::Succ(n))))
                    })
                })?;
                let res = mc.apply(g, self.eval(&s2));
                Ok((
                    Rc::new(Term::NatRec {
                        motive: m2,
                        zero: z2,
                        succ: succ2,
                        scrutinee: s2,
                    }),
                    res,
                ))
            }
            Term::EmptyRec { motive, scrutinee } => {
                let (m2, _) = self.check_type(motive)?;
                let s2 = self.check(scrutinee, &Rc::new(Value::Empty))?;
                let res = self.eval(&m2);
                Ok((
                    Rc::new(Term::EmptyRec {
                        motive: m2,
                        scrutinee: s2,
                    }),
                    res,
                ))
            }
            Term::Ann(e, a) => {
                let (a2, _) = self.check_type(a)?;
                let av = self.eval(&a2);
                let e2 = self.check(e, &av)?;
                Ok((Rc::new(Term::Ann(e2, a2)), av))
            }
            Term::Lam { dom: None, .. } => self.err(
                ErrorKind::CannotInfer,
                "lam",
                "cannot infer the type of an unannotated λ; annotate its binder".into(),
            ),
            Term::Refl => self.err(
                ErrorKind::CannotInfer,
                "refl",
                "cannot infer the type of refl; use it where a path type is expected".into(),
            ),
            Term::Hole => self.err(ErrorKind::CannotInfer, "hole", "unfilled hole".into()),
        }
    }
}

/// Shift every free variable up by one, for reuse under a fresh binder.
fn shift_up(t: &RcTerm) -> RcTerm {
    crate::syntax::shift(t, 1, 0)
}

/// Infer the type of `t` in `ctx`, returning it as a normal-form term.
pub fn infer(sig: &Signature, ctx: &Context, t: &RcTerm) -> TResult<RcTerm> {
    let cx = check_context(sig, ctx)?;
    let mut c = Checker::with_cx(sig, cx);
    let (_, ty) = c.infer(t)?;
    Ok(c.quote_ty(&ty))
}

/// Check that every binding type of `ctx` is a type behind its own lock.
pub fn check_context(sig: &Signature, ctx: &Context) -> TResult<Cx> {
    let mut c = Checker::new(sig);
    for e in ctx.entries() {
        match e {
            Entry::Lock(m) => c.cx.lock(*m),
            Entry::Bind(m, ty) => {
                let (ty2, _) = c.locked(*m, |c| c.check_type(ty))?;
                let v = c.eval(&ty2);
                let name = c.fresh();
                c.cx.bind(*m, v, name);
            }
        }
    }
    Ok(c.cx)
}

/// Check a declaration against the signature before it.
pub fn check_decl(sig: &Signature, d: &Declaration) -> TResult<Declaration> {
    let name = d.name.to_string();
    if sig.contains(&name) {
        return Err(CheckError::new(
            ErrorKind::DuplicateName,
            "decl",
            Some(d.span),
            format!("`{name}` is already declared"),
        )
        .in_decl(&name));
    }
    let mut c = Checker::new(sig);
    let (ty, level) = c.check_type(&d.ty).map_err(|e| e.in_decl(&name))?;
    let kind = match &d.kind {
        DeclKind::Postulate => DeclKind::Postulate,
        DeclKind::Definition(body) => {
            let tyv = c.eval(&ty);
            DeclKind::Definition(c.check(body, &tyv).map_err(|e| e.in_decl(&name))?)
        }
    };
    Ok(Declaration {
        name: d.name.clone(),
        kind,
        ty,
        level: Some(level),
        span: d.span,
    })
}
