//! Core syntax: de Bruijn terms, lock-carrying contexts and admissible
//! substitution.

use std::fmt;
use std::rc::Rc;

use serde::Serialize;
use thiserror::Error;

use crate::modality::{compose, Modality};

pub type RcTerm = Rc<Term>;
pub type Name = Rc<str>;

/// Byte range in a source file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn merge(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

/// Terms of the core calculus. Binding positions are noted per variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(usize),
    Univ(u32),
    /// `(x :(μ) A) → B`; `B` binds one variable.
    Pi(Modality, RcTerm, RcTerm),
    /// `λ x. body`; `mode`/`dom` are optional annotations, filled in by the
    /// checker and dropped by read-back.
    Lam {
        mode: Option<Modality>,
        dom: Option<RcTerm>,
        body: RcTerm,
    },
    /// `f(a)` where `a` lives behind a `mode` lock.
    App {
        mode: Option<Modality>,
        fun: RcTerm,
        arg: RcTerm,
    },
    /// `Σ (x : A). B`; `B` binds one variable.
    Sigma(RcTerm, RcTerm),
    Pair(RcTerm, RcTerm),
    Fst(RcTerm),
    Snd(RcTerm),
    /// `a =_A b`. The type is `Hole` until the checker fills it.
    Id(RcTerm, RcTerm, RcTerm),
    Refl,
    /// Based path induction; `motive` binds `y` and `p : a = y`.
    J {
        motive: RcTerm,
        base: RcTerm,
        target: RcTerm,
    },
    /// The modal type `⟨μ | A⟩`.
    Modal(Modality, RcTerm),
    /// `mod⟨μ⟩ a`.
    Mod(Modality, RcTerm),
    /// `let⟨ν⟩ mod⟨μ⟩ x = scrutinee in body`; `motive` and `body` bind one
    /// variable each.
    LetMod {
        outer: Modality,
        inner: Modality,
        motive: RcTerm,
        scrutinee: RcTerm,
        body: RcTerm,
    },
    Bool,
    True,
    False,
    /// `motive` binds one variable.
    BoolRec {
        motive: RcTerm,
        on_true: RcTerm,
        on_false: RcTerm,
        scrutinee: RcTerm,
    },
    Nat,
    Zero,
    Succ(RcTerm),
    /// `motive` binds one variable, `succ` binds the predecessor and the
    /// induction hypothesis.
    NatRec {
        motive: RcTerm,
        zero: RcTerm,
        succ: RcTerm,
        scrutinee: RcTerm,
    },
    Unit,
    Star,
    Empty,
    EmptyRec {
        motive: RcTerm,
        scrutinee: RcTerm,
    },
    /// A global constant applied to a spine of arguments.
    Const {
        name: Name,
        spine: Vec<Arg>,
    },
    /// `(e : A)`.
    Ann(RcTerm, RcTerm),
    /// Placeholder left by elaboration, filled by the checker.
    Hole,
    /// Source position of the wrapped term.
    Loc(Span, RcTerm),
    /// Written name of variable `0`; wraps the body of a binder. Inert.
    Named(Name, RcTerm),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub mode: Option<Modality>,
    pub term: RcTerm,
}

impl Term {
    pub fn var(i: usize) -> RcTerm {
        Rc::new(Term::Var(i))
    }

    pub fn constant(name: &str) -> RcTerm {
        Rc::new(Term::Const {
            name: name.into(),
            spine: Vec::new(),
        })
    }

    pub fn pi(mode: Modality, dom: RcTerm, cod: RcTerm) -> RcTerm {
        Rc::new(Term::Pi(mode, dom, cod))
    }

    pub fn lam(body: RcTerm) -> RcTerm {
        Rc::new(Term::Lam {
            mode: None,
            dom: None,
            body,
        })
    }

    pub fn app(fun: RcTerm, arg: RcTerm) -> RcTerm {
        Rc::new(Term::App { mode: None, fun, arg })
    }

    pub fn app_mode(mode: Modality, fun: RcTerm, arg: RcTerm) -> RcTerm {
        Rc::new(Term::App {
            mode: Some(mode),
            fun,
            arg,
        })
    }

    /// Remove `Loc` and `Named` wrappers everywhere.
    pub fn strip_locs(t: &RcTerm) -> RcTerm {
        map_children(t, 0, &mut |t, _| match &**t {
            Term::Loc(_, inner) | Term::Named(_, inner) => Some(Term::strip_locs(inner)),
            _ => None,
        })
    }
}

/// Rebuild `t`, letting `f` replace any subterm (given its binder depth
/// relative to `t`). `f` returning `None` means "recurse structurally".
fn map_children(t: &RcTerm, depth: usize, f: &mut dyn FnMut(&RcTerm, usize) -> Option<RcTerm>) -> RcTerm {
    if let Some(r) = f(t, depth) {
        return r;
    }
    let mut go = |s: &RcTerm, extra: usize| map_children(s, depth + extra, f);
    let new = match &**t {
        Term::Var(_)
        | Term::Univ(_)
        | Term::Refl
        | Term::Bool
        | Term::True
        | Term::False
        | Term::Nat
        | Term::Zero
        | Term::Unit
        | Term::Star
        | Term::Empty
        | Term::Hole => return t.clone(),
        Term::Pi(m, a, b) => Term::Pi(*m, go(a, 0), go(b, 1)),
        Term::Lam { mode, dom, body } => Term::Lam {
            mode: *mode,
            dom: dom.as_ref().map(|d| go(d, 0)),
            body: go(body, 1),
        },
        Term::App { mode, fun, arg } => Term::App {
            mode: *mode,
            fun: go(fun, 0),
            arg: go(arg, 0),
        },
        Term::Sigma(a, b) => Term::Sigma(go(a, 0), go(b, 1)),
        Term::Pair(a, b) => Term::Pair(go(a, 0), go(b, 0)),
        Term::Fst(a) => Term::Fst(go(a, 0)),
        Term::Snd(a) => Term::Snd(go(a, 0)),
        Term::Id(a, x, y) => Term::Id(go(a, 0), go(x, 0), go(y, 0)),
        Term::J { motive, base, target } => Term::J {
            motive: go(motive, 2),
            base: go(base, 0),
            target: go(target, 0),
        },
        Term::Modal(m, a) => Term::Modal(*m, go(a, 0)),
        Term::Mod(m, a) => Term::Mod(*m, go(a, 0)),
        Term::LetMod {
            outer,
            inner,
            motive,
            scrutinee,
            body,
        } => Term::LetMod {
            outer: *outer,
            inner: *inner,
            motive: go(motive, 1),
            scrutinee: go(scrutinee, 0),
            body: go(body, 1),
        },
        Term::BoolRec {
            motive,
            on_true,
            on_false,
            scrutinee,
        } => Term::BoolRec {
            motive: go(motive, 1),
            on_true: go(on_true, 0),
            on_false: go(on_false, 0),
            scrutinee: go(scrutinee, 0),
        },
        Term::Succ(n) => Term::Succ(go(n, 0)),
        Term::NatRec {
            motive,
            zero,
            succ,
            scrutinee,
        } => Term::NatRec {
            motive: go(motive, 1),
            zero: go(zero, 0),
            succ: go(succ, 2),
            scrutinee: go(scrutinee, 0),
        },
        Term::EmptyRec { motive, scrutinee } => Term::EmptyRec {
            motive: go(motive, 0),
            scrutinee: go(scrutinee, 0),
        },
        Term::Const { name, spine } => Term::Const {
            name: name.clone(),
            spine: spine
                .iter()
                .map(|a| Arg {
                    mode: a.mode,
                    term: go(&a.term, 0),
                })
                .collect(),
        },
        Term::Ann(e, a) => Term::Ann(go(e, 0), go(a, 0)),
        Term::Loc(s, e) => Term::Loc(*s, go(e, 0)),
        Term::Named(n, e) => Term::Named(n.clone(), go(e, 0)),
    };
    Rc::new(new)
}

/// Add `by` to every variable with index `>= cutoff`.
pub fn shift(t: &RcTerm, by: usize, cutoff: usize) -> RcTerm {
    if by == 0 {
        return t.clone();
    }
    map_children(t, 0, &mut |t, depth| match &**t {
        Term::Var(i) if *i >= cutoff + depth => Some(Term::var(i + by)),
        Term::Var(_) => Some(t.clone()),
        _ => None,
    })
}

/// Substitute `arg` for variable `0` of `body` and lower the others.
/// `arg` is scoped in the context without that variable.
pub fn subst_top(body: &RcTerm, arg: &RcTerm) -> RcTerm {
    map_children(body, 0, &mut |t, depth| match &**t {
        Term::Var(i) if *i == depth => Some(shift(arg, depth, 0)),
        Term::Var(i) if *i > depth => Some(Term::var(i - 1)),
        Term::Var(_) => Some(t.clone()),
        _ => None,
    })
}

/// Replace variable `0` of `body` by `arg`, where `arg` is scoped in the same
/// (extended) context; the other variables are untouched. This is the
/// substitution `[wk, arg]`.
pub fn subst_extend(body: &RcTerm, arg: &RcTerm) -> RcTerm {
    subst_top(&shift(body, 1, 1), arg)
}

/// True when every free variable of `t` is below `n`.
pub fn is_closed_under(t: &RcTerm, n: usize) -> bool {
    let mut ok = true;
    map_children(t, 0, &mut |t, depth| match &**t {
        Term::Var(i) => {
            if *i >= n + depth {
                ok = false;
            }
            Some(t.clone())
        }
        _ => None,
    });
    ok
}

/// A context entry: a lock or a binding annotated with its modality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry<T> {
    Lock(Modality),
    Bind(Modality, T),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("variable index {index} out of range ({binds} bindings)")]
    OutOfRange { index: usize, binds: usize },
    #[error("context entry {position} is a lock, not a binding")]
    NotABinding { position: usize },
}

/// A telescope of locks and bindings. Variable indices count bindings only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Telescope<T> {
    entries: Vec<Entry<T>>,
    binds: usize,
}

impl<T> Default for Telescope<T> {
    fn default() -> Self {
        Telescope {
            entries: Vec::new(),
            binds: 0,
        }
    }
}

/// What the variable rule needs to know about a binding.
#[derive(Debug)]
pub struct VarInfo<'a, T> {
    /// Position of the binding counted from the start (a de Bruijn level).
    pub level: usize,
    /// The modality the variable was bound at.
    pub mode: Modality,
    pub ty: &'a T,
    /// Composite of the locks between the binding and the end.
    pub locks: Modality,
}

impl<T> Telescope<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[Entry<T>] {
        &self.entries
    }

    /// Number of bindings.
    pub fn len(&self) -> usize {
        self.binds
    }

    pub fn is_empty(&self) -> bool {
        self.binds == 0
    }

    pub fn lock(&mut self, mode: Modality) {
        self.entries.push(Entry::Lock(mode));
    }

    pub fn bind(&mut self, mode: Modality, ty: T) {
        self.entries.push(Entry::Bind(mode, ty));
        self.binds += 1;
    }

    pub fn pop(&mut self) -> Option<Entry<T>> {
        let e = self.entries.pop();
        if let Some(Entry::Bind(..)) = e {
            self.binds -= 1;
        }
        e
    }

    pub fn with_lock(mut self, mode: Modality) -> Self {
        self.lock(mode);
        self
    }

    pub fn with_bind(mut self, mode: Modality, ty: T) -> Self {
        self.bind(mode, ty);
        self
    }

    /// Look up a variable by de Bruijn index.
    pub fn lookup(&self, index: usize) -> Result<VarInfo<'_, T>, ScopeError> {
        let mut locks = Modality::Id;
        let mut seen = 0;
        for entry in self.entries.iter().rev() {
            match entry {
                // walking inwards, earlier locks are further out
                Entry::Lock(m) => locks = compose(*m, locks),
                Entry::Bind(mode, ty) => {
                    if seen == index {
                        return Ok(VarInfo {
                            level: self.binds - 1 - index,
                            mode: *mode,
                            ty,
                            locks,
                        });
                    }
                    seen += 1;
                }
            }
        }
        Err(ScopeError::OutOfRange {
            index,
            binds: self.binds,
        })
    }

    /// The modality `ν` guarding variable `index`: the composite of all locks
    /// after its binding, outermost first.
    pub fn locks_between(&self, index: usize) -> Result<Modality, ScopeError> {
        self.lookup(index).map(|v| v.locks)
    }

    /// Same as [`Telescope::locks_between`], addressing the entry by position.
    pub fn locks_after_entry(&self, position: usize) -> Result<Modality, ScopeError> {
        match self.entries.get(position) {
            None => Err(ScopeError::OutOfRange {
                index: position,
                binds: self.binds,
            }),
            Some(Entry::Lock(_)) => Err(ScopeError::NotABinding { position }),
            Some(Entry::Bind(..)) => Ok(self.entries[position + 1..]
                .iter()
                .fold(Modality::Id, |acc, e| match e {
                    Entry::Lock(m) => compose(acc, *m),
                    Entry::Bind(..) => acc,
                })),
        }
    }

    /// Composite of all locks after the last binding.
    pub fn trailing_locks(&self) -> Modality {
        let mut acc = Modality::Id;
        for e in self.entries.iter().rev() {
            match e {
                Entry::Lock(m) => acc = compose(*m, acc),
                Entry::Bind(..) => break,
            }
        }
        acc
    }
}

/// True when variable `index` occurs free in `t`.
pub fn occurs(t: &RcTerm, index: usize) -> bool {
    let mut found = false;
    map_children(t, 0, &mut |t, depth| match &**t {
        Term::Var(i) => {
            if *i == index + depth {
                found = true;
            }
            Some(t.clone())
        }
        _ => None,
    });
    found
}

/// Names of the constants mentioned in `t`.
pub fn constants(t: &RcTerm) -> Vec<Name> {
    let mut out: Vec<Name> = Vec::new();
    map_children(t, 0, &mut |t, _| {
        if let Term::Const { name, .. } = &**t {
            if !out.contains(name) {
                out.push(name.clone());
            }
        }
        None
    });
    out
}

/// A syntactic context: binding types are core terms, each scoped in the
/// prefix before it extended by the binding's lock.
pub type Context = Telescope<RcTerm>;

/// Whether a global is a definition or a postulate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Definition(RcTerm),
    Postulate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declaration {
    pub name: Name,
    pub kind: DeclKind,
    pub ty: RcTerm,
    /// Universe level of `ty`, once checked.
    pub level: Option<u32>,
    pub span: Span,
}

impl Declaration {
    pub fn definition(name: &str, ty: RcTerm, body: RcTerm) -> Declaration {
        Declaration {
            name: name.into(),
            kind: DeclKind::Definition(body),
            ty,
            level: None,
            span: Span::default(),
        }
    }

    pub fn postulate(name: &str, ty: RcTerm) -> Declaration {
        Declaration {
            name: name.into(),
            kind: DeclKind::Postulate,
            ty,
            level: None,
            span: Span::default(),
        }
    }

    pub fn is_postulate(&self) -> bool {
        matches!(self.kind, DeclKind::Postulate)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> RcTerm {
        Term::constant("c")
    }

    #[test]
    fn subst_top_examples() {
        assert_eq!(subst_top(&Term::var(0), &c()), c());
        assert_eq!(subst_top(&Term::var(1), &c()), Term::var(0));
        let body = Term::app(Term::var(0), Term::var(0));
        assert_eq!(subst_top(&body, &c()), Term::app(c(), c()));
    }

    #[test]
    fn subst_shifts_under_binders() {
        // λ. #1  with #0 := #3  ~~>  λ. #4
        let body = Term::lam(Term::var(1));
        assert_eq!(subst_top(&body, &Term::var(3)), Term::lam(Term::var(4)));
        // bound variable untouched
        let body = Term::lam(Term::var(0));
        assert_eq!(subst_top(&body, &c()), body);
    }

    #[test]
    fn subst_extend_replaces_only_top() {
        let body = Term::app(Term::var(0), Term::var(1));
        let arg = Rc::new(Term::Mod(Modality::Glo, Term::var(0)));
        assert_eq!(subst_extend(&body, &arg), Term::app(arg.clone(), Term::var(1)));
    }

    #[test]
    fn locks_between_examples() {
        let a = Term::constant("A");
        let ctx = Context::new()
            .with_bind(Modality::Glo, a.clone())
            .with_lock(Modality::Glo);
        assert_eq!(ctx.locks_between(0), Ok(Modality::Glo));
        assert!(Modality::Glo.leq(ctx.locks_between(0).unwrap()));

        let ctx = Context::new()
            .with_bind(Modality::Id, a.clone())
            .with_lock(Modality::Glo);
        assert!(!Modality::Id.leq(ctx.locks_between(0).unwrap()));

        let ctx = Context::new().with_bind(Modality::Glo, a.clone());
        assert_eq!(ctx.locks_between(0), Ok(Modality::Id));
        assert!(Modality::Glo.leq(Modality::Id));
    }

    #[test]
    fn locks_compose_outermost_first() {
        let a = Term::constant("A");
        let ctx = Context::new()
            .with_bind(Modality::Id, a.clone())
            .with_lock(Modality::Op)
            .with_bind(Modality::Id, a.clone())
            .with_lock(Modality::Glo);
        assert_eq!(ctx.locks_between(1), Ok(Modality::OpGlo));
        assert_eq!(ctx.locks_between(0), Ok(Modality::Glo));
        assert_eq!(ctx.locks_after_entry(0), Ok(Modality::OpGlo));
        assert_eq!(ctx.locks_after_entry(1), Err(ScopeError::NotABinding { position: 1 }));
        assert_eq!(ctx.locks_between(2), Err(ScopeError::OutOfRange { index: 2, binds: 2 }));
    }

    #[test]
    fn empty_span_of_locks_is_id() {
        let ctx = Context::new().with_bind(Modality::Sha, Term::constant("A"));
        assert_eq!(ctx.locks_between(0), Ok(Modality::Id));
        assert_eq!(ctx.trailing_locks(), Modality::Id);
    }
}
