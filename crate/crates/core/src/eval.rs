//! Normalization by evaluation with type-directed read-back.
//!
//! Values use de Bruijn levels. Definitions unfold as soon as they are
//! evaluated; postulates become neutral heads. Read-back is η-long for Π, Σ
//! and Unit, and leaves modal types alone.

use std::rc::Rc;

use thiserror::Error;

use crate::modality::Modality;
use crate::syntax::{is_closed_under, Arg, Context, Entry, Name, RcTerm, Term};

pub type Val = Rc<Value>;
pub type Env = Vec<Val>;

#[derive(Clone, Debug)]
pub struct Closure {
    pub env: Env,
    pub body: RcTerm,
}

#[derive(Clone, Debug)]
pub enum Value {
    Univ(u32),
    Pi(Modality, Val, Closure),
    Lam(Closure),
    Sigma(Val, Closure),
    Pair(Val, Val),
    Id(Val, Val, Val),
    Refl,
    Modal(Modality, Val),
    Mod(Modality, Val),
    Bool,
    True,
    False,
    Nat,
    Zero,
    Succ(Val),
    Unit,
    Star,
    Empty,
    Neutral(Neutral),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    /// A variable, as a de Bruijn level.
    Var(usize),
    /// A postulate (or a name the globals do not define).
    Const(Name),
}

#[derive(Clone, Debug)]
pub struct Neutral {
    pub head: Head,
    pub spine: Vec<Elim>,
}

#[derive(Clone, Debug)]
pub enum Elim {
    App(Modality, Val),
    Fst,
    Snd,
    J {
        motive: Closure,
        base: Val,
    },
    LetMod {
        outer: Modality,
        inner: Modality,
        motive: Closure,
        body: Closure,
    },
    BoolRec {
        motive: Closure,
        on_true: Val,
        on_false: Val,
    },
    NatRec {
        motive: Closure,
        zero: Val,
        succ: Closure,
    },
    EmptyRec {
        motive: Val,
    },
}

/// Access to the global signature during evaluation.
pub trait Globals {
    /// Value of a definition; `None` for postulates and unknown names.
    fn definition(&self, name: &str) -> Option<Val>;
    /// Type of any declared constant.
    fn type_of(&self, name: &str) -> Option<Val>;
}

/// A signature with no constants.
pub struct NoGlobals;

impl Globals for NoGlobals {
    fn definition(&self, _: &str) -> Option<Val> {
        None
    }
    fn type_of(&self, _: &str) -> Option<Val> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("term mentions a variable outside its {depth}-variable context")]
    IllScoped { depth: usize },
}

impl Value {
    pub fn var(level: usize) -> Val {
        Rc::new(Value::Neutral(Neutral {
            head: Head::Var(level),
            spine: Vec::new(),
        }))
    }
}

impl Closure {
    pub fn new(env: &Env, body: &RcTerm) -> Closure {
        Closure {
            env: env.clone(),
            body: body.clone(),
        }
    }

    pub fn apply(&self, g: &dyn Globals, arg: Val) -> Val {
        let mut env = self.env.clone();
        env.push(arg);
        eval(g, &env, &self.body)
    }

    pub fn apply2(&self, g: &dyn Globals, a: Val, b: Val) -> Val {
        let mut env = self.env.clone();
        env.push(a);
        env.push(b);
        eval(g, &env, &self.body)
    }
}

/// Evaluate a well-scoped term. Indices past the environment are a caller
/// bug; use [`normalize`] for a checked entry point.
pub fn eval(g: &dyn Globals, env: &Env, t: &RcTerm) -> Val {
    match &**t {
        Term::Var(i) => {
            assert!(*i < env.len(), "ill-scoped variable #{i}");
            env[env.len() - 1 - i].clone()
        }
        Term::Univ(l) => Rc::new(Value::Univ(*l)),
        Term::Pi(m, a, b) => Rc::new(Value::Pi(*m, eval(g, env, a), Closure::new(env, b))),
        Term::Lam { body, .. } => Rc::new(Value::Lam(Closure::new(env, body))),
        Term::App { mode, fun, arg } => apply(g, eval(g, env, fun), mode.unwrap_or(Modality::Id), eval(g, env, arg)),
        Term::Sigma(a, b) => Rc::new(Value::Sigma(eval(g, env, a), Closure::new(env, b))),
        Term::Pair(a, b) => Rc::new(Value::Pair(eval(g, env, a), eval(g, env, b))),
        Term::Fst(p) => fst(eval(g, env, p)),
        Term::Snd(p) => snd(eval(g, env, p)),
        Term::Id(a, x, y) => Rc::new(Value::Id(eval(g, env, a), eval(g, env, x), eval(g, env, y))),
        Term::Refl => Rc::new(Value::Refl),
        Term::J { motive, base, target } => {
            let target = eval(g, env, target);
            let base = eval(g, env, base);
            match &*target {
                Value::Refl => base,
                _ => push(
                    target,
                    Elim::J {
                        motive: Closure::new(env, motive),
                        base,
                    },
                ),
            }
        }
        Term::Modal(m, a) => Rc::new(Value::Modal(*m, eval(g, env, a))),
        Term::Mod(m, a) => Rc::new(Value::Mod(*m, eval(g, env, a))),
        Term::LetMod {
            outer,
            inner,
            motive,
            scrutinee,
            body,
        } => {
            let scrut = eval(g, env, scrutinee);
            match &*scrut {
                Value::Mod(_, a) => Closure::new(env, body).apply(g, a.clone()),
                _ => push(
                    scrut,
                    Elim::LetMod {
                        outer: *outer,
                        inner: *inner,
                        motive: Closure::new(env, motive),
                        body: Closure::new(env, body),
                    },
                ),
            }
        }
        Term::Bool => Rc::new(Value::Bool),
        Term::True => Rc::new(Value::True),
        Term::False => Rc::new(Value::False),
        Term::BoolRec {
            motive,
            on_true,
            on_false,
            scrutinee,
        } => {
            let scrut = eval(g, env, scrutinee);
            match &*scrut {
                Value::True => eval(g, env, on_true),
                Value::False => eval(g, env, on_false),
                _ => push(
                    scrut,
                    Elim::BoolRec {
                        motive: Closure::new(env, motive),
                        on_true: eval(g, env, on_true),
                        on_false: eval(g, env, on_false),
                    },
                ),
            }
        }
        Term::Nat => Rc::new(Value::Nat),
        Term::Zero => Rc::new(Value::Zero),
        Term::Succ(n) => Rc::new(Value::Succ(eval(g, env, n))),
        Term::NatRec {
            motive,
            zero,
            succ,
            scrutinee,
        } => nat_rec(
            g,
            Closure::new(env, motive),
            eval(g, env, zero),
            Closure::new(env, succ),
            eval(g, env, scrutinee),
        ),
        Term::Unit => Rc::new(Value::Unit),
        Term::Star => Rc::new(Value::Star),
        Term::Empty => Rc::new(Value::Empty),
        Term::EmptyRec { motive, scrutinee } => push(
            eval(g, env, scrutinee),
            Elim::EmptyRec {
                motive: eval(g, env, motive),
            },
        ),
        Term::Const { name, spine } => {
            let head = g.definition(name).unwrap_or_else(|| {
                Rc::new(Value::Neutral(Neutral {
                    head: Head::Const(name.clone()),
                    spine: Vec::new(),
                }))
            });
            spine.iter().fold(head, |f, a| {
                apply(g, f, a.mode.unwrap_or(Modality::Id), eval(g, env, &a.term))
            })
        }
        Term::Ann(e, _) | Term::Loc(_, e) | Term::Named(_, e) => eval(g, env, e),
        Term::Hole => panic!("evaluating an unfilled hole"),
    }
}

fn push(v: Val, e: Elim) -> Val {
    match &*v {
        Value::Neutral(n) => {
            let mut n = n.clone();
            n.spine.push(e);
            Rc::new(Value::Neutral(n))
        }
        other => panic!("eliminating a non-neutral canonical value {other:?}"),
    }
}

pub fn apply(g: &dyn Globals, f: Val, mode: Modality, a: Val) -> Val {
    match &*f {
        Value::Lam(cl) => cl.apply(g, a),
        _ => push(f, Elim::App(mode, a)),
    }
}

pub fn fst(p: Val) -> Val {
    match &*p {
        Value::Pair(a, _) => a.clone(),
        _ => push(p, Elim::Fst),
    }
}

pub fn snd(p: Val) -> Val {
    match &*p {
        Value::Pair(_, b) => b.clone(),
        _ => push(p, Elim::Snd),
    }
}

fn nat_rec(g: &dyn Globals, motive: Closure, zero: Val, succ: Closure, n: Val) -> Val {
    // iterate over the successor prefix so deep numerals do not recurse
    let mut preds = Vec::new();
    let mut cur = n;
    while let Value::Succ(p) = &*cur {
        let p = p.clone();
        preds.push(p.clone());
        cur = p;
    }
    let mut acc = match &*cur {
        Value::Zero => zero,
        _ => push(
            cur,
            Elim::NatRec {
                motive,
                zero,
                succ: succ.clone(),
            },
        ),
    };
    for p in preds.into_iter().rev() {
        acc = succ.apply2(g, p, acc);
    }
    acc
}

/// Re-apply an eliminator to a value (used while walking a neutral spine).
pub fn eliminate(g: &dyn Globals, v: Val, e: &Elim) -> Val {
    match e {
        Elim::App(m, a) => apply(g, v, *m, a.clone()),
        Elim::Fst => fst(v),
        Elim::Snd => snd(v),
        Elim::J { motive, base } => match &*v {
            Value::Refl => base.clone(),
            _ => push(
                v,
                Elim::J {
                    motive: motive.clone(),
                    base: base.clone(),
                },
            ),
        },
        Elim::LetMod { body, .. } => match &*v {
            Value::Mod(_, a) => body.apply(g, a.clone()),
            _ => push(v, e.clone()),
        },
        Elim::BoolRec { on_true, on_false, .. } => match &*v {
            Value::True => on_true.clone(),
            Value::False => on_false.clone(),
            _ => push(v, e.clone()),
        },
        Elim::NatRec { motive, zero, succ } => nat_rec(g, motive.clone(), zero.clone(), succ.clone(), v),
        Elim::EmptyRec { .. } => push(v, e.clone()),
    }
}

/// Read-back state: the types of the variables in scope, by level.
pub struct Quoter<'g> {
    pub globals: &'g dyn Globals,
    pub types: Vec<Val>,
}

impl<'g> Quoter<'g> {
    pub fn new(globals: &'g dyn Globals, types: Vec<Val>) -> Self {
        Quoter { globals, types }
    }

    fn depth(&self) -> usize {
        self.types.len()
    }

    fn index(&self, level: usize) -> RcTerm {
        Term::var(self.depth() - 1 - level)
    }

    fn under<R>(&mut self, ty: Val, f: impl FnOnce(&mut Self, Val) -> R) -> R {
        let x = Value::var(self.depth());
        self.types.push(ty);
        let r = f(self, x);
        self.types.pop();
        r
    }

    /// η-long read-back of `v` at type `ty`.
    pub fn quote(&mut self, ty: &Val, v: &Val) -> RcTerm {
        let g = self.globals;
        match (&**ty, &**v) {
            (Value::Pi(m, a, b), _) => {
                let m = *m;
                let body = self.under(a.clone(), |q, x| {
                    let bty = b.apply(g, x.clone());
                    let bv = apply(g, v.clone(), m, x);
                    q.quote(&bty, &bv)
                });
                Rc::new(Term::Lam {
                    mode: Some(m),
                    dom: None,
                    body,
                })
            }
            (Value::Sigma(a, b), _) => {
                let p1 = fst(v.clone());
                let p2 = snd(v.clone());
                let bty = b.apply(g, p1.clone());
                Rc::new(Term::Pair(self.quote(a, &p1), self.quote(&bty, &p2)))
            }
            (Value::Unit, _) => Rc::new(Term::Star),
            (Value::Univ(_), _) => self.quote_ty(v),
            (Value::Modal(m, a), Value::Mod(_, x)) => Rc::new(Term::Mod(*m, self.quote(a, x))),
            (Value::Nat, Value::Succ(n)) => Rc::new(Term::Succ(self.quote(ty, n))),
            (_, Value::Neutral(n)) => self.quote_ne(n).0,
            _ => self.quote_untyped(v),
        }
    }

    /// Read back a type.
    pub fn quote_ty(&mut self, v: &Val) -> RcTerm {
        let g = self.globals;
        match &**v {
            Value::Univ(l) => Rc::new(Term::Univ(*l)),
            Value::Pi(m, a, b) => {
                let dom = self.quote_ty(a);
                let cod = self.under(a.clone(), |q, x| q.quote_ty(&b.apply(g, x)));
                Rc::new(Term::Pi(*m, dom, cod))
            }
            Value::Sigma(a, b) => {
                let dom = self.quote_ty(a);
                let cod = self.under(a.clone(), |q, x| q.quote_ty(&b.apply(g, x)));
                Rc::new(Term::Sigma(dom, cod))
            }
            Value::Id(a, x, y) => Rc::new(Term::Id(self.quote_ty(a), self.quote(a, x), self.quote(a, y))),
            Value::Modal(m, a) => Rc::new(Term::Modal(*m, self.quote_ty(a))),
            Value::Bool => Rc::new(Term::Bool),
            Value::Nat => Rc::new(Term::Nat),
            Value::Unit => Rc::new(Term::Unit),
            Value::Empty => Rc::new(Term::Empty),
            Value::Neutral(n) => self.quote_ne(n).0,
            _ => self.quote_untyped(v),
        }
    }

    fn head_type(&self, head: &Head) -> Option<Val> {
        match head {
            Head::Var(l) => self.types.get(*l).cloned(),
            Head::Const(name) => self.globals.type_of(name),
        }
    }

    /// Read back a neutral, returning it with its type when known.
    pub fn quote_ne(&mut self, n: &Neutral) -> (RcTerm, Option<Val>) {
        let g = self.globals;
        let mut ty = self.head_type(&n.head);
        let mut cur = Rc::new(Value::Neutral(Neutral {
            head: n.head.clone(),
            spine: Vec::new(),
        }));
        let mut term = match &n.head {
            Head::Var(l) => self.index(*l),
            Head::Const(name) => Rc::new(Term::Const {
                name: name.clone(),
                spine: Vec::new(),
            }),
        };
        for e in &n.spine {
            let (t, next_ty) = self.quote_elim(&term, ty.as_ref(), &cur, e);
            term = t;
            ty = next_ty;
            cur = eliminate(g, cur, e);
        }
        (term, ty)
    }

    fn quote_elim(&mut self, head: &RcTerm, ty: Option<&Val>, cur: &Val, e: &Elim) -> (RcTerm, Option<Val>) {
        let g = self.globals;
        match (e, ty.map(|t| &**t)) {
            (Elim::App(_, a), Some(Value::Pi(m, dom, cod))) => {
                let arg = self.quote(dom, a);
                (app_term(head, *m, arg), Some(cod.apply(g, a.clone())))
            }
            (Elim::App(m, a), _) => {
                let arg = self.quote_untyped(a);
                (app_term(head, *m, arg), None)
            }
            (Elim::Fst, Some(Value::Sigma(a, _))) => (Rc::new(Term::Fst(head.clone())), Some(a.clone())),
            (Elim::Snd, Some(Value::Sigma(_, b))) => {
                (Rc::new(Term::Snd(head.clone())), Some(b.apply(g, fst(cur.clone()))))
            }
            (Elim::Fst, _) => (Rc::new(Term::Fst(head.clone())), None),
            (Elim::Snd, _) => (Rc::new(Term::Snd(head.clone())), None),
            (Elim::J { motive, base }, Some(Value::Id(a, x, y))) => {
                let (a, x, y) = (a.clone(), x.clone(), y.clone());
                let motive_t = self.under(a.clone(), |q, yv| {
                    let pty = Rc::new(Value::Id(a.clone(), x.clone(), yv.clone()));
                    q.under(pty, |q, pv| q.quote_ty(&motive.apply2(g, yv, pv)))
                });
                let base_ty = motive.apply2(g, x.clone(), Rc::new(Value::Refl));
                let base_t = self.quote(&base_ty, base);
                (
                    Rc::new(Term::J {
                        motive: motive_t,
                        base: base_t,
                        target: head.clone(),
                    }),
                    Some(motive.apply2(g, y, cur.clone())),
                )
            }
            (
                Elim::LetMod {
                    outer,
                    inner,
                    motive,
                    body,
                },
                Some(Value::Modal(m, a)),
            ) => {
                let scrut_ty = Rc::new(Value::Modal(*m, a.clone()));
                let motive_t = self.under(scrut_ty, |q, x| q.quote_ty(&motive.apply(g, x)));
                let m = *m;
                let body_t = self.under(a.clone(), |q, x| {
                    let bty = motive.apply(g, Rc::new(Value::Mod(m, x.clone())));
                    q.quote(&bty, &body.apply(g, x))
                });
                (
                    Rc::new(Term::LetMod {
                        outer: *outer,
                        inner: *inner,
                        motive: motive_t,
                        scrutinee: head.clone(),
                        body: body_t,
                    }),
                    Some(motive.apply(g, cur.clone())),
                )
            }
            (
                Elim::BoolRec {
                    motive,
                    on_true,
                    on_false,
                },
                _,
            ) => {
                let motive_t = self.under(Rc::new(Value::Bool), |q, x| q.quote_ty(&motive.apply(g, x)));
                let t = self.quote(&motive.apply(g, Rc::new(Value::True)), on_true);
                let f = self.quote(&motive.apply(g, Rc::new(Value::False)), on_false);
                (
                    Rc::new(Term::BoolRec {
                        motive: motive_t,
                        on_true: t,
                        on_false: f,
                        scrutinee: head.clone(),
                    }),
                    Some(motive.apply(g, cur.clone())),
                )
            }
            (Elim::NatRec { motive, zero, succ }, _) => {
                let nat = Rc::new(Value::Nat);
                let motive_t = self.under(nat.clone(), |q, x| q.quote_ty(&motive.apply(g, x)));
                let z = self.quote(&motive.apply(g, Rc::new(Value::Zero)), zero);
                let s = self.under(nat, |q, n| {
                    let ih_ty = motive.apply(g, n.clone());
                    q.under(ih_ty, |q, ih| {
                        let res_ty = motive.apply(g, Rc::new(Value::Succ(n.clone())));
                        q.quote(&res_ty, &succ.apply2(g, n, ih))
                    })
                });
                (
                    Rc::new(Term::NatRec {
                        motive: motive_t,
                        zero: z,
                        succ: s,
                        scrutinee: head.clone(),
                    }),
                    Some(motive.apply(g, cur.clone())),
                )
            }
            (Elim::EmptyRec { motive }, _) => (
                Rc::new(Term::EmptyRec {
                    motive: self.quote_ty(motive),
                    scrutinee: head.clone(),
                }),
                Some(motive.clone()),
            ),
            // the head type did not match the eliminator; fall back
            (Elim::J { motive, base }, _) => {
                let motive_t = self.under(Rc::new(Value::Unit), |q, y| {
                    q.under(Rc::new(Value::Unit), |q, p| q.quote_ty(&motive.apply2(g, y, p)))
                });
                let base_t = self.quote_untyped(base);
                (
                    Rc::new(Term::J {
                        motive: motive_t,
                        base: base_t,
                        target: head.clone(),
                    }),
                    None,
                )
            }
            (
                Elim::LetMod {
                    outer,
                    inner,
                    motive,
                    body,
                },
                _,
            ) => {
                let unit = Rc::new(Value::Unit);
                let motive_t = self.under(unit.clone(), |q, x| q.quote_ty(&motive.apply(g, x)));
                let body_t = self.under(unit, |q, x| q.quote_untyped(&body.apply(g, x)));
                (
                    Rc::new(Term::LetMod {
                        outer: *outer,
                        inner: *inner,
                        motive: motive_t,
                        scrutinee: head.clone(),
                        body: body_t,
                    }),
                    None,
                )
            }
        }
    }

    /// Structural read-back without η, for values whose type is unknown.
    pub fn quote_untyped(&mut self, v: &Val) -> RcTerm {
        let g = self.globals;
        let unit = || Rc::new(Value::Unit);
        Rc::new(match &**v {
            Value::Lam(cl) => Term::Lam {
                mode: None,
                dom: None,
                body: self.under(unit(), |q, x| q.quote_untyped(&cl.apply(g, x))),
            },
            Value::Pair(a, b) => Term::Pair(self.quote_untyped(a), self.quote_untyped(b)),
            Value::Refl => Term::Refl,
            Value::Mod(m, a) => Term::Mod(*m, self.quote_untyped(a)),
            Value::True => Term::True,
            Value::False => Term::False,
            Value::Zero => Term::Zero,
            Value::Succ(n) => Term::Succ(self.quote_untyped(n)),
            Value::Star => Term::Star,
            Value::Neutral(n) => return self.quote_ne(n).0,
            _ => return self.quote_ty(v),
        })
    }
}

fn app_term(head: &RcTerm, mode: Modality, arg: RcTerm) -> RcTerm {
    let arg = Arg {
        mode: Some(mode),
        term: arg,
    };
    match &**head {
        // postulate heads collect their arguments into the spine
        Term::Const { name, spine } => {
            let mut spine = spine.clone();
            spine.push(arg);
            Rc::new(Term::Const {
                name: name.clone(),
                spine,
            })
        }
        _ => Rc::new(Term::App {
            mode: arg.mode,
            fun: head.clone(),
            arg: arg.term,
        }),
    }
}

/// Semantic environment for a context: each binding is a fresh variable.
/// Returns the environment and the binding types as values.
pub fn context_values(g: &dyn Globals, ctx: &Context) -> (Env, Vec<Val>) {
    let mut env: Env = Vec::new();
    let mut types = Vec::new();
    for e in ctx.entries() {
        if let Entry::Bind(_, ty) = e {
            types.push(eval(g, &env, ty));
            env.push(Value::var(env.len()));
        }
    }
    (env, types)
}

/// β-normal, η-long form of `t : ty` in `ctx`.
pub fn normalize(g: &dyn Globals, ctx: &Context, ty: &RcTerm, t: &RcTerm) -> Result<RcTerm, EvalError> {
    let depth = ctx.len();
    if !is_closed_under(t, depth) || !is_closed_under(ty, depth) {
        return Err(EvalError::IllScoped { depth });
    }
    let (env, types) = context_values(g, ctx);
    let tyv = eval(g, &env, ty);
    let v = eval(g, &env, t);
    Ok(Quoter::new(g, types).quote(&tyv, &v))
}

/// Normal form of a type in `ctx`.
pub fn normalize_type(g: &dyn Globals, ctx: &Context, ty: &RcTerm) -> Result<RcTerm, EvalError> {
    let depth = ctx.len();
    if !is_closed_under(ty, depth) {
        return Err(EvalError::IllScoped { depth });
    }
    let (env, types) = context_values(g, ctx);
    let v = eval(g, &env, ty);
    Ok(Quoter::new(g, types).quote_ty(&v))
}

/// Definitional equality of `a` and `b` at `ty`.
pub fn convertible(g: &dyn Globals, ctx: &Context, ty: &RcTerm, a: &RcTerm, b: &RcTerm) -> bool {
    match (normalize(g, ctx, ty, a), normalize(g, ctx, ty, b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Conversion on values, given the variable types in scope.
pub fn conv_val(g: &dyn Globals, types: &[Val], ty: &Val, a: &Val, b: &Val) -> bool {
    let mut q = Quoter::new(g, types.to_vec());
    q.quote(ty, a) == q.quote(ty, b)
}

pub fn conv_ty(g: &dyn Globals, types: &[Val], a: &Val, b: &Val) -> bool {
    let mut q = Quoter::new(g, types.to_vec());
    q.quote_ty(a) == q.quote_ty(b)
}

/// Cumulative subtyping: universes grow, Π is covariant in its codomain, Σ in
/// both components and modal types in their body.
pub fn subtype(g: &dyn Globals, types: &mut Vec<Val>, a: &Val, b: &Val) -> bool {
    match (&**a, &**b) {
        (Value::Univ(i), Value::Univ(j)) => i <= j,
        (Value::Pi(m1, a1, b1), Value::Pi(m2, a2, b2)) => {
            if m1 != m2 || !conv_ty(g, types, a1, a2) {
                return false;
            }
            under_var(types, a1.clone(), |types, x| {
                subtype(g, types, &b1.apply(g, x.clone()), &b2.apply(g, x))
            })
        }
        (Value::Sigma(a1, b1), Value::Sigma(a2, b2)) => {
            subtype(g, types, a1, a2)
                && under_var(types, a1.clone(), |types, x| {
                    subtype(g, types, &b1.apply(g, x.clone()), &b2.apply(g, x))
                })
        }
        (Value::Modal(m1, a1), Value::Modal(m2, a2)) => m1 == m2 && subtype(g, types, a1, a2),
        _ => conv_ty(g, types, a, b),
    }
}

fn under_var<R>(types: &mut Vec<Val>, ty: Val, f: impl FnOnce(&mut Vec<Val>, Val) -> R) -> R {
    let x = Value::var(types.len());
    types.push(ty);
    let r = f(types, x);
    types.pop();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    /// Postulates only, each with a closed type.
    struct Posts(HashMap<&'static str, RcTerm>);

    impl Globals for Posts {
        fn definition(&self, _: &str) -> Option<Val> {
            None
        }
        fn type_of(&self, name: &str) -> Option<Val> {
            self.0.get(name).map(|t| eval(self, &Vec::new(), t))
        }
    }

    fn posts() -> Posts {
        let mut m = HashMap::new();
        m.insert("A", Rc::new(Term::Univ(0)));
        m.insert("c", Term::constant("A"));
        Posts(m)
    }

    fn a() -> RcTerm {
        Term::constant("A")
    }

    #[test]
    fn beta_identity() {
        let g = posts();
        let t = Term::app(Term::lam(Term::var(0)), Term::constant("c"));
        let nf = normalize(&g, &Context::new(), &a(), &t).unwrap();
        assert_eq!(nf, Term::constant("c"));
    }

    #[test]
    fn eta_for_modal_pi_variable() {
        let g = posts();
        for m in Modality::ALL {
            let fty = Term::pi(m, a(), a());
            let ctx = Context::new().with_bind(Modality::Id, fty.clone());
            let nf = normalize(&g, &ctx, &fty, &Term::var(0)).unwrap();
            let expected = Rc::new(Term::Lam {
                mode: Some(m),
                dom: None,
                body: Term::app_mode(m, Term::var(1), Term::var(0)),
            });
            assert_eq!(nf, expected);
        }
    }

    #[test]
    fn letmod_beta() {
        let g = posts();
        let c = Term::constant("c");
        let t = Rc::new(Term::LetMod {
            outer: Modality::Id,
            inner: Modality::Glo,
            motive: a(),
            scrutinee: Rc::new(Term::Mod(Modality::Glo, c.clone())),
            body: Term::var(0),
        });
        assert_eq!(normalize(&g, &Context::new(), &a(), &t).unwrap(), c);
    }

    #[test]
    fn j_on_refl() {
        let g = posts();
        let c = Term::constant("c");
        let t = Rc::new(Term::J {
            motive: a(),
            base: c.clone(),
            target: Rc::new(Term::Refl),
        });
        assert_eq!(normalize(&g, &Context::new(), &a(), &t).unwrap(), c);
    }

    #[test]
    fn convertible_examples() {
        let g = NoGlobals;
        let ctx = Context::new();
        let b = Rc::new(Term::Bool);
        let t = Rc::new(Term::True);
        let f = Rc::new(Term::False);
        assert!(convertible(&g, &ctx, &b, &t, &t));
        assert!(!convertible(&g, &ctx, &b, &t, &f));
        let g = posts();
        let fty = Term::pi(Modality::Id, a(), a());
        let ctx = Context::new().with_bind(Modality::Id, fty.clone());
        let eta = Term::lam(Term::app(Term::var(1), Term::var(0)));
        assert!(convertible(&g, &ctx, &fty, &eta, &Term::var(0)));
    }

    #[test]
    fn no_eta_for_modal_types() {
        let g = posts();
        let ty = Rc::new(Term::Modal(Modality::Glo, a()));
        let ctx = Context::new().with_bind(Modality::Id, ty.clone());
        let nf = normalize(&g, &ctx, &ty, &Term::var(0)).unwrap();
        assert_eq!(nf, Term::var(0));
    }

    #[test]
    fn eta_for_sigma_and_unit() {
        let g = posts();
        let sig = Rc::new(Term::Sigma(a(), a()));
        let ctx = Context::new().with_bind(Modality::Id, sig.clone());
        let nf = normalize(&g, &ctx, &sig, &Term::var(0)).unwrap();
        assert_eq!(
            nf,
            Rc::new(Term::Pair(
                Rc::new(Term::Fst(Term::var(0))),
                Rc::new(Term::Snd(Term::var(0)))
            ))
        );
        let unit = Rc::new(Term::Unit);
        let ctx = Context::new().with_bind(Modality::Id, unit.clone());
        assert_eq!(normalize(&g, &ctx, &unit, &Term::var(0)).unwrap(), Rc::new(Term::Star));
    }

    #[test]
    fn natrec_computes() {
        let g = NoGlobals;
        let nat = Rc::new(Term::Nat);
        let two = Rc::new(Term::Succ(Rc::new(Term::Succ(Rc::new(Term::Zero)))));
        // double n = natrec(n, 0, suc suc ih)
        let t = Rc::new(Term::NatRec {
            motive: nat.clone(),
            zero: Rc::new(Term::Zero),
            succ: Rc::new(Term::Succ(Rc::new(Term::Succ(Term::var(0))))),
            scrutinee: two,
        });
        let nf = normalize(&g, &Context::new(), &nat, &t).unwrap();
        let mut four = Rc::new(Term::Zero);
        for _ in 0..4 {
            four = Rc::new(Term::Succ(four));
        }
        assert_eq!(nf, four);
    }

    #[test]
    fn ill_scoped_is_reported() {
        let g = NoGlobals;
        let err = normalize(&g, &Context::new(), &Rc::new(Term::Bool), &Term::var(0));
        assert_eq!(err, Err(EvalError::IllScoped { depth: 0 }));
    }

    #[test]
    fn cumulativity() {
        let g = NoGlobals;
        let u0 = Rc::new(Value::Univ(0));
        let u1 = Rc::new(Value::Univ(1));
        assert!(subtype(&g, &mut Vec::new(), &u0, &u1));
        assert!(!subtype(&g, &mut Vec::new(), &u1, &u0));
    }
}
