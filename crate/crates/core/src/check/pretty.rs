//! Printing core terms back to parseable surface syntax, inventing names for
//! bound variables.

use std::fmt::Write as _;

use super::surface::is_keyword;
use crate::modality::Modality;
use crate::syntax::{constants, occurs, DeclKind, Declaration, RcTerm, Term};

const CANDIDATES: &[&str] = &[
    "x", "y", "z", "w", "u", "v", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "n", "m", "p", "q", "r", "s",
    "t",
];

/// A name not in `scope` and not in `avoid`.
pub fn fresh_name(scope: &[String], avoid: &[String]) -> String {
    let taken = |n: &str| scope.iter().any(|s| s == n) || avoid.iter().any(|s| s == n) || is_keyword(n);
    for suffix in 0.. {
        for c in CANDIDATES {
            let name = if suffix == 0 {
                c.to_string()
            } else {
                format!("{c}{suffix}")
            };
            if !taken(&name) {
                return name;
            }
        }
    }
    unreachable!()
}

// precedence levels, loosest first
const EXPR: u8 = 0;
const PROD: u8 = 1;
const EQ: u8 = 2;
const APP: u8 = 3;
const PREFIX: u8 = 4;
const ATOM: u8 = 5;

struct Printer {
    scope: Vec<String>,
    avoid: Vec<String>,
}

/// Print `t` with the given names for its free variables (innermost last).
pub fn term(names: &[String], t: &RcTerm) -> String {
    let mut p = Printer {
        scope: names.to_vec(),
        avoid: constants(t).iter().map(|n| n.to_string()).collect(),
    };
    p.go(t, EXPR)
}

pub fn declaration(d: &Declaration) -> String {
    match &d.kind {
        DeclKind::Definition(body) => format!("def {} : {} :=\n  {}\n", d.name, term(&[], &d.ty), term(&[], body)),
        DeclKind::Postulate => format!("postulate {} : {}\n", d.name, term(&[], &d.ty)),
    }
}

fn mode_suffix(m: Modality) -> String {
    if m.is_id() {
        ":".into()
    } else {
        format!(":({m})")
    }
}

impl Printer {
    fn bind(&mut self) -> String {
        let n = fresh_name(&self.scope, &self.avoid);
        self.scope.push(n.clone());
        n
    }

    /// Bind the variable of a binder whose body is `body`, keeping its
    /// written name when that name is free.
    fn bind_for(&mut self, body: &RcTerm) -> String {
        if let Some(n) = written_name(body) {
            let taken = self.scope.iter().any(|s| s == n) || self.avoid.iter().any(|s| s == n) || is_keyword(n);
            if !taken {
                self.scope.push(n.to_string());
                return n.to_string();
            }
        }
        self.bind()
    }

    fn unbind(&mut self, k: usize) {
        for _ in 0..k {
            self.scope.pop();
        }
    }

    fn under(&mut self, t: &RcTerm, prec: u8) -> (String, String) {
        let x = self.bind_for(t);
        let s = self.go(t, prec);
        self.unbind(1);
        (x, s)
    }

    fn paren(s: String, own: u8, want: u8) -> String {
        if own < want {
            format!("({s})")
        } else {
            s
        }
    }

    fn go(&mut self, t: &RcTerm, want: u8) -> String {
        let (s, own) = self.render(t);
        Self::paren(s, own, want)
    }

    fn render(&mut self, t: &RcTerm) -> (String, u8) {
        match &**t {
            Term::Loc(_, e) | Term::Named(_, e) => self.render(e),
            Term::Var(i) => match self.scope.len().checked_sub(i + 1) {
                Some(l) => (self.scope[l].clone(), ATOM),
                None => (format!("#{i}"), ATOM),
            },
            Term::Univ(l) => (format!("U{l}"), ATOM),
            Term::Pi(m, a, b) => {
                let a_s = if m.is_id() && !occurs(b, 0) {
                    self.go(a, PROD)
                } else {
                    self.go(a, EXPR)
                };
                let (x, b_s) = self.under(b, EXPR);
                if m.is_id() && !occurs(b, 0) {
                    (format!("{a_s} → {b_s}"), EXPR)
                } else {
                    (format!("({x} {} {a_s}) → {b_s}", mode_suffix(*m)), EXPR)
                }
            }
            Term::Sigma(a, b) => {
                if occurs(b, 0) {
                    let a_s = self.go(a, EXPR);
                    let (x, b_s) = self.under(b, EXPR);
                    (format!("({x} : {a_s}) × {b_s}"), EXPR)
                } else {
                    let a_s = self.go(a, EQ);
                    let (_, b_s) = self.under(b, PROD);
                    (format!("{a_s} × {b_s}"), PROD)
                }
            }
            Term::Lam { .. } => {
                let mut binders = Vec::new();
                let mut cur = t.clone();
                let mut bound = 0;
                loop {
                    let next = match &*cur {
                        Term::Loc(_, e) | Term::Named(_, e) => e.clone(),
                        Term::Lam { mode, dom, body } => {
                            let dom_s = dom.as_ref().map(|d| self.go(d, EXPR));
                            let x = self.bind_for(body);
                            bound += 1;
                            binders.push(match dom_s {
                                Some(d) => format!("({x} {} {d})", mode_suffix(mode.unwrap_or(Modality::Id))),
                                None => x,
                            });
                            body.clone()
                        }
                        _ => break,
                    };
                    cur = next;
                }
                let body = self.go(&cur, EXPR);
                self.unbind(bound);
                (format!("λ {}. {body}", binders.join(" ")), EXPR)
            }
            Term::App { fun, arg, .. } => {
                let f = self.go(fun, APP);
                let a = self.go(arg, PREFIX);
                (format!("{f} {a}"), APP)
            }
            Term::Const { name, spine } => {
                if spine.is_empty() {
                    return (name.to_string(), ATOM);
                }
                let mut s = name.to_string();
                for a in spine {
                    let _ = write!(s, " {}", self.go(&a.term, PREFIX));
                }
                (s, APP)
            }
            Term::Pair(a, b) => (format!("({}, {})", self.go(a, EXPR), self.go(b, EXPR)), ATOM),
            Term::Fst(p) => (format!("fst {}", self.go(p, PREFIX)), PREFIX),
            Term::Snd(p) => (format!("snd {}", self.go(p, PREFIX)), PREFIX),
            Term::Succ(n) => (format!("suc {}", self.go(n, PREFIX)), PREFIX),
            Term::Id(ty, a, b) => {
                let needs_type = matches!(
                    &*strip(a),
                    Term::Lam { dom: None, .. } | Term::Pair(..) | Term::Refl | Term::Mod(..)
                ) && !matches!(&**ty, Term::Hole);
                if needs_type {
                    (
                        format!("Id({}, {}, {})", self.go(ty, EXPR), self.go(a, EXPR), self.go(b, EXPR)),
                        ATOM,
                    )
                } else {
                    (format!("{} = {}", self.go(a, APP), self.go(b, APP)), EQ)
                }
            }
            Term::Refl => ("refl".into(), ATOM),
            Term::J { motive, base, target } => {
                let y = self.bind();
                let p = self.bind();
                let m = self.go(motive, EXPR);
                self.unbind(2);
                (
                    format!("J({y} {p}. {m}, {}, {})", self.go(base, EXPR), self.go(target, EXPR)),
                    ATOM,
                )
            }
            Term::Modal(m, a) => (format!("⟨{m} | {}⟩", self.go(a, EXPR)), ATOM),
            Term::Mod(m, a) => (format!("mod⟨{m}⟩ {}", self.go(a, PREFIX)), PREFIX),
            Term::LetMod {
                outer,
                inner,
                motive,
                scrutinee,
                body,
            } => {
                let s = self.go(scrutinee, EXPR);
                let (y, m) = self.under(motive, EXPR);
                let (x, b) = self.under(body, EXPR);
                let outer = if outer.is_id() {
                    String::new()
                } else {
                    format!("⟨{outer}⟩")
                };
                (
                    format!("let{outer} mod⟨{inner}⟩ {x} = {s} return {y}. {m} in {b}"),
                    EXPR,
                )
            }
            Term::Bool => ("Bool".into(), ATOM),
            Term::True => ("true".into(), ATOM),
            Term::False => ("false".into(), ATOM),
            Term::BoolRec {
                motive,
                on_true,
                on_false,
                scrutinee,
            } => {
                let (x, m) = self.under(motive, EXPR);
                (
                    format!(
                        "boolrec({x}. {m}, {}, {}, {})",
                        self.go(on_true, EXPR),
                        self.go(on_false, EXPR),
                        self.go(scrutinee, EXPR)
                    ),
                    ATOM,
                )
            }
            Term::Nat => ("Nat".into(), ATOM),
            Term::Zero => ("zero".into(), ATOM),
            Term::NatRec {
                motive,
                zero,
                succ,
                scrutinee,
            } => {
                let (x, m) = self.under(motive, EXPR);
                let z = self.go(zero, EXPR);
                let n = self.bind();
                let ih = self.bind();
                let s = self.go(succ, EXPR);
                self.unbind(2);
                (
                    format!("natrec({x}. {m}, {z}, {n} {ih}. {s}, {})", self.go(scrutinee, EXPR)),
                    ATOM,
                )
            }
            Term::Unit => ("Unit".into(), ATOM),
            Term::Star => ("tt".into(), ATOM),
            Term::Empty => ("Empty".into(), ATOM),
            Term::EmptyRec { motive, scrutinee } => (
                format!("absurd({}, {})", self.go(motive, EXPR), self.go(scrutinee, EXPR)),
                ATOM,
            ),
            Term::Ann(e, a) => (format!("the {} {}", self.go(a, PREFIX), self.go(e, PREFIX)), PREFIX),
            Term::Hole => ("?".into(), ATOM),
        }
    }
}

fn written_name(t: &RcTerm) -> Option<&str> {
    match &**t {
        Term::Named(n, _) => Some(n),
        Term::Loc(_, e) => written_name(e),
        _ => None,
    }
}

fn strip(t: &RcTerm) -> RcTerm {
    match &**t {
        Term::Loc(_, e) | Term::Named(_, e) => strip(e),
        _ => t.clone(),
    }
}
