//! Finitely presented bounded distributive lattices.
//!
//! An element is stored as its truth table over the satisfying assignments of
//! the presentation: the homomorphisms into the two-element lattice. Two terms
//! are equal in the presented lattice exactly when their tables agree.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_BOUND: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LatTerm {
    Zero,
    One,
    Gen(String),
    Meet(Box<LatTerm>, Box<LatTerm>),
    Join(Box<LatTerm>, Box<LatTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("{generators} generators exceed the bound of {bound}")]
    BoundExceeded { generators: usize, bound: usize },
    #[error("parse error at byte {at}: {message}")]
    Parse { at: usize, message: String },
}

impl LatError {
    pub fn kind(&self) -> &'static str {
        match self {
            LatError::UnknownGenerator(_) => "UNKNOWN_GENERATOR",
            LatError::BoundExceeded { .. } => "BOUND_EXCEEDED",
            LatError::Parse { .. } => "PARSE",
        }
    }
}

impl LatTerm {
    pub fn gen(name: &str) -> LatTerm {
        LatTerm::Gen(name.to_string())
    }

    pub fn meet(a: LatTerm, b: LatTerm) -> LatTerm {
        LatTerm::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: LatTerm, b: LatTerm) -> LatTerm {
        LatTerm::Join(Box::new(a), Box::new(b))
    }

    /// Evaluate under an assignment of generator indices to bits.
    fn eval(&self, index: &dyn Fn(&str) -> usize, bits: u32) -> bool {
        match self {
            LatTerm::Zero => false,
            LatTerm::One => true,
            LatTerm::Gen(g) => bits >> index(g) & 1 == 1,
            LatTerm::Meet(a, b) => a.eval(index, bits) && b.eval(index, bits),
            LatTerm::Join(a, b) => a.eval(index, bits) || b.eval(index, bits),
        }
    }

    pub fn generators(&self, out: &mut Vec<String>) {
        match self {
            LatTerm::Zero | LatTerm::One => {}
            LatTerm::Gen(g) => {
                if !out.contains(g) {
                    out.push(g.clone())
                }
            }
            LatTerm::Meet(a, b) | LatTerm::Join(a, b) => {
                a.generators(out);
                b.generators(out);
            }
        }
    }

    pub fn parse(src: &str) -> Result<LatTerm, LatError> {
        let mut p = TermParser::new(src);
        let t = p.join()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

impl fmt::Display for LatTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &LatTerm, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                LatTerm::Zero => write!(f, "0"),
                LatTerm::One => write!(f, "1"),
                LatTerm::Gen(g) => write!(f, "{g}"),
                LatTerm::Join(a, b) => {
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
                LatTerm::Meet(a, b) => {
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

/// Parser for `0 1 /\ \/ ∧ ∨ ( )` and identifiers; `∧` binds tighter.
pub(crate) struct TermParser<'a> {
    pub(crate) src: &'a str,
    pub(crate) pos: usize,
}

impl<'a> TermParser<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        TermParser { src, pos: 0 }
    }

    pub(crate) fn error(&self, message: &str) -> LatError {
        LatError::Parse {
            at: self.pos,
            message: message.to_string(),
        }
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn skip_ws(&mut self) {
        loop {
            let r = self.rest();
            let trimmed = r.trim_start();
            self.pos += r.len() - trimmed.len();
            if trimmed.starts_with("--") || trimmed.starts_with('#') {
                let line = trimmed.find('\n').unwrap_or(trimmed.len());
                self.pos += line;
            } else {
                return;
            }
        }
    }

    pub(crate) fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let r = self.rest();
        let mut chars = r.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|(_, c)| !(c.is_alphanumeric() || *c == '_' || *c == '\''))
            .map_or(r.len(), |(i, _)| i);
        self.pos += end;
        Some(r[..end].to_string())
    }

    pub(crate) fn join(&mut self) -> Result<LatTerm, LatError> {
        let mut t = self.meet()?;
        while self.eat("\\/") || self.eat("∨") {
            t = LatTerm::join(t, self.meet()?);
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<LatTerm, LatError> {
        let mut t = self.primary()?;
        while self.eat("/\\") || self.eat("∧") {
            t = LatTerm::meet(t, self.primary()?);
        }
        Ok(t)
    }

    pub(crate) fn primary(&mut self) -> Result<LatTerm, LatError> {
        if self.eat("(") {
            let t = self.join()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            return Ok(t);
        }
        if self.eat("0") {
            return Ok(LatTerm::Zero);
        }
        if self.eat("1") {
            return Ok(LatTerm::One);
        }
        match self.ident() {
            Some(g) => Ok(LatTerm::Gen(g)),
            None => Err(self.error("expected a lattice term")),
        }
    }
}

/// Generators and relations `fᵢ = gᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relations: Vec<(LatTerm, LatTerm)>,
}

impl Presentation {
    pub fn free(generators: &[&str]) -> Presentation {
        Presentation {
            generators: generators.iter().map(|s| s.to_string()).collect(),
            relations: Vec::new(),
        }
    }

    /// The free lattice on `x1..xk`.
    pub fn free_k(k: usize) -> Presentation {
        Presentation {
            generators: (1..=k).map(|i| format!("x{i}")).collect(),
            relations: Vec::new(),
        }
    }

    /// The n-simplex: `x1 ≥ x2 ≥ … ≥ xn`.
    pub fn simplex(n: usize) -> Presentation {
        let mut p = Presentation::free_k(n);
        for i in 1..n {
            p.add_le(LatTerm::gen(&format!("x{}", i + 1)), LatTerm::gen(&format!("x{i}")));
        }
        p
    }

    /// Record `a ≤ b` as `a ∧ b = a`.
    pub fn add_le(&mut self, a: LatTerm, b: LatTerm) {
        self.relations.push((LatTerm::meet(a.clone(), b), a));
    }

    /// Parse `gens: x y; rel: x /\ y = y; rel: x <= y;`.
    pub fn parse(src: &str) -> Result<Presentation, LatError> {
        let mut p = TermParser::new(src);
        let mut pres = Presentation {
            generators: Vec::new(),
            relations: Vec::new(),
        };
        loop {
            p.skip_ws();
            if p.rest().is_empty() {
                break;
            }
            if p.eat("gens:") || p.eat("gens") {
                while let Some(g) = p.ident() {
                    if pres.generators.contains(&g) {
                        return Err(p.error(&format!("generator `{g}` declared twice")));
                    }
                    pres.generators.push(g);
                }
            } else if p.eat("rel:") || p.eat("rel") {
                loop {
                    let lhs = p.join()?;
                    if p.eat("<=") || p.eat("≤") {
                        let rhs = p.join()?;
                        pres.add_le(lhs, rhs);
                    } else if p.eat(">=") || p.eat("≥") {
                        let rhs = p.join()?;
                        pres.add_le(rhs, lhs);
                    } else if p.eat("=") {
                        let rhs = p.join()?;
                        pres.relations.push((lhs, rhs));
                    } else {
                        return Err(p.error("expected `=`, `<=` or `>=`"));
                    }
                    if !p.eat(",") {
                        break;
                    }
                }
            } else {
                return Err(p.error("expected `gens:` or `rel:`"));
            }
            if !p.eat(";") {
                p.skip_ws();
                if !p.rest().is_empty() {
                    return Err(p.error("expected `;`"));
                }
            }
        }
        let mut used = Vec::new();
        for (a, b) in &pres.relations {
            a.generators(&mut used);
            b.generators(&mut used);
        }
        if let Some(g) = used.into_iter().find(|g| !pres.generators.contains(g)) {
            return Err(LatError::UnknownGenerator(g));
        }
        Ok(pres)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens: {};", self.generators.join(" "))?;
        for (a, b) in &self.relations {
            write!(f, " rel: {a} = {b};")?;
        }
        Ok(())
    }
}

/// An element: a monotone truth table over the points of the spectrum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoFn {
    pub table: Vec<bool>,
}

impl MonoFn {
    pub fn leq(&self, other: &MonoFn) -> bool {
        self.table.iter().zip(&other.table).all(|(a, b)| !a || *b)
    }

    pub fn meet(&self, other: &MonoFn) -> MonoFn {
        MonoFn {
            table: self.table.iter().zip(&other.table).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn join(&self, other: &MonoFn) -> MonoFn {
        MonoFn {
            table: self.table.iter().zip(&other.table).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn ones(&self) -> usize {
        self.table.iter().filter(|b| **b).count()
    }
}

/// A presentation together with its spectrum, ready for queries.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub presentation: Presentation,
    /// Satisfying assignments as bitmasks (bit `i` = generator `i`), ascending.
    pub points: Vec<u32>,
}

impl Lattice {
    pub fn new(presentation: Presentation, bound: usize) -> Result<Lattice, LatError> {
        let k = presentation.generators.len();
        if k > bound || k > 16 {
            return Err(LatError::BoundExceeded {
                generators: k,
                bound: bound.min(16),
            });
        }
        let index = |g: &str| {
            presentation
                .generators
                .iter()
                .position(|x| x == g)
                .expect("relations were validated")
        };
        for (a, b) in &presentation.relations {
            let mut used = Vec::new();
            a.generators(&mut used);
            b.generators(&mut used);
            if let Some(g) = used.into_iter().find(|g| !presentation.generators.contains(g)) {
                return Err(LatError::UnknownGenerator(g));
            }
        }
        let points = (0..1u32 << k)
            .filter(|&bits| {
                presentation
                    .relations
                    .iter()
                    .all(|(a, b)| a.eval(&index, bits) == b.eval(&index, bits))
            })
            .collect();
        Ok(Lattice { presentation, points })
    }

    pub fn generators(&self) -> &[String] {
        &self.presentation.generators
    }

    fn index_of(&self, g: &str) -> Option<usize> {
        self.presentation.generators.iter().position(|x| x == g)
    }

    pub fn normal_form(&self, t: &LatTerm) -> Result<MonoFn, LatError> {
        let mut used = Vec::new();
        t.generators(&mut used);
        if let Some(g) = used.into_iter().find(|g| self.index_of(g).is_none()) {
            return Err(LatError::UnknownGenerator(g));
        }
        let index = |g: &str| self.index_of(g).expect("checked above");
        Ok(MonoFn {
            table: self.points.iter().map(|&p| t.eval(&index, p)).collect(),
        })
    }

    pub fn decide_leq(&self, s: &LatTerm, t: &LatTerm) -> Result<bool, LatError> {
        Ok(self.normal_form(s)?.leq(&self.normal_form(t)?))
    }

    pub fn decide_eq(&self, s: &LatTerm, t: &LatTerm) -> Result<bool, LatError> {
        Ok(self.normal_form(s)? == self.normal_form(t)?)
    }

    pub fn bottom(&self) -> MonoFn {
        MonoFn {
            table: vec![false; self.points.len()],
        }
    }

    pub fn top(&self) -> MonoFn {
        MonoFn {
            table: vec![true; self.points.len()],
        }
    }

    /// Every element, found by closing `{0, 1, generators}` under ∧ and ∨.
    /// Sorted by number of true points, then by table.
    pub fn enumerate_elements(&self) -> Vec<MonoFn> {
        let mut seen: BTreeSet<MonoFn> = BTreeSet::new();
        let mut frontier = vec![self.bottom(), self.top()];
        for g in self.generators() {
            frontier.push(self.normal_form(&LatTerm::gen(g)).expect("own generator"));
        }
        while let Some(x) = frontier.pop() {
            if !seen.insert(x.clone()) {
                continue;
            }
            let current: Vec<MonoFn> = seen.iter().cloned().collect();
            for y in &current {
                for z in [x.meet(y), x.join(y)] {
                    if !seen.contains(&z) {
                        frontier.push(z);
                    }
                }
            }
        }
        let mut out: Vec<MonoFn> = seen.into_iter().collect();
        out.sort_by(|a, b| a.ones().cmp(&b.ones()).then_with(|| a.cmp(b)));
        out
    }

    /// Pointwise order on spectrum points: `leq[i][j]` iff point i ≤ point j.
    pub fn spectrum_order(&self) -> Vec<Vec<bool>> {
        self.points
            .iter()
            .map(|&p| self.points.iter().map(|&q| p & !q == 0).collect())
            .collect()
    }

    /// All monotone maps from the spectrum to {0, 1}, by brute force.
    pub fn monotone_maps(&self) -> Vec<MonoFn> {
        let n = self.points.len();
        let order = self.spectrum_order();
        let mut out = Vec::new();
        for mask in 0u64..1u64 << n {
            let f = |i: usize| mask >> i & 1 == 1;
            let monotone = (0..n).all(|i| (0..n).all(|j| !order[i][j] || !f(i) || f(j)));
            if monotone {
                out.push(MonoFn {
                    table: (0..n).map(f).collect(),
                });
            }
        }
        out
    }

    /// Read an element back as an irredundant join of meets of generators.
    pub fn to_term(&self, f: &MonoFn) -> LatTerm {
        // Shortest join of prime monomials covering f. A monomial (set of
        // generators) denotes the points containing it; it is prime when it
        // lies below f and no smaller monomial does.
        let k = self.generators().len();
        let below_f = |m: u32| self.points.iter().zip(&f.table).all(|(&p, &v)| v || p & m != m);
        let candidates: Vec<u32> = (0u32..1 << k).filter(|&m| below_f(m)).collect();
        let mut primes: Vec<u32> = candidates
            .iter()
            .copied()
            .filter(|&m| !candidates.iter().any(|&c| c != m && c & m == c))
            .collect();
        primes.sort_by_key(|m| (m.count_ones(), *m));
        let cover = |m: u32| -> Vec<bool> { self.points.iter().map(|&p| p & m == m).collect() };
        let covers: Vec<Vec<bool>> = primes.iter().map(|&m| cover(m)).collect();
        let needed: Vec<usize> = (0..self.points.len()).filter(|&i| f.table[i]).collect();
        let chosen = self.smallest_cover(&primes, &covers, &needed);
        let meet_of = |m: u32| {
            (0..k)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| LatTerm::gen(&self.generators()[i]))
                .reduce(LatTerm::meet)
                .unwrap_or(LatTerm::One)
        };
        chosen
            .into_iter()
            .map(|i| meet_of(primes[i]))
            .reduce(LatTerm::join)
            .unwrap_or(LatTerm::Zero)
    }

    fn smallest_cover(&self, primes: &[u32], covers: &[Vec<bool>], needed: &[usize]) -> Vec<usize> {
        let covered = |set: &[usize]| needed.iter().all(|&p| set.iter().any(|&i| covers[i][p]));
        let weight = |set: &[usize]| set.iter().map(|&i| primes[i].count_ones() as usize + 1).sum::<usize>();
        if primes.len() <= 16 {
            // exact: fewest symbols, ties broken by the earliest subset
            let mut best: Option<(usize, Vec<usize>)> = None;
            for mask in 0u32..1 << primes.len() {
                let set: Vec<usize> = (0..primes.len()).filter(|i| mask >> i & 1 == 1).collect();
                if !covered(&set) {
                    continue;
                }
                let w = weight(&set);
                if best.as_ref().is_none_or(|(bw, bs)| (w, &set) < (*bw, bs)) {
                    best = Some((w, set));
                }
            }
            return best.map(|(_, s)| s).unwrap_or_default();
        }
        // greedy fallback for large prime sets
        let mut set = Vec::new();
        let mut open: Vec<usize> = needed.to_vec();
        while !open.is_empty() {
            let i = (0..primes.len())
                .max_by_key(|&i| (open.iter().filter(|&&p| covers[i][p]).count(), std::cmp::Reverse(i)))
                .expect("f is covered by its own points");
            set.push(i);
            open.retain(|&p| !covers[i][p]);
        }
        set.sort_unstable();
        set
    }

    /// Finite shadow of duality: evaluation sends elements bijectively onto
    /// monotone maps out of the spectrum.
    pub fn duality_check(&self) -> DualityReport {
        let elements = self.enumerate_elements();
        let maps: BTreeSet<MonoFn> = self.monotone_maps().into_iter().collect();
        let images: BTreeSet<MonoFn> = elements.iter().cloned().collect();
        let injective = images.len() == elements.len();
        let into_maps = images.iter().all(|e| maps.contains(e));
        let surjective = maps.iter().all(|m| images.contains(m));
        DualityReport {
            generators: self.generators().len(),
            spectrum_points: self.points.len(),
            elements: elements.len(),
            monotone_maps: maps.len(),
            bijection: injective && into_maps && surjective,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub generators: usize,
    pub spectrum_points: usize,
    pub elements: usize,
    pub monotone_maps: usize,
    pub bijection: bool,
}

/// Restriction of a map 𝕀 → 𝕀 given by a monotone function on {0,1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Restriction {
    Zero,
    Identity,
    One,
}

impl Restriction {
    pub const ALL: [Restriction; 3] = [Restriction::Zero, Restriction::Identity, Restriction::One];

    fn of(at0: bool, at1: bool) -> Option<Restriction> {
        match (at0, at1) {
            (false, false) => Some(Restriction::Zero),
            (false, true) => Some(Restriction::Identity),
            (true, true) => Some(Restriction::One),
            (true, false) => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Restriction::Zero => "0",
            Restriction::Identity => "id",
            Restriction::One => "1",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlueCell {
    /// α(0, −)
    pub at_zero: Restriction,
    /// α(1, −)
    pub at_one: Restriction,
    /// The elements α of the free lattice on {k, j} in this cell.
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlueReport {
    pub elements: usize,
    pub cells: Vec<GlueCell>,
    /// Every element landed in exactly one cell, and the non-empty cells are
    /// exactly the expected leaves.
    pub matches_case_tree: bool,
    /// The cell α(0,−) = id, α(1,−) = 0 is empty.
    pub excluded_cell_empty: bool,
    /// The α(0,−) = 1 cells contain only the constant 1.
    pub one_leaf_is_constant: bool,
}

/// The expected leaves of the case split on α : 𝕀² → 𝕀 by its restrictions
/// at k = 0 and k = 1.
pub const GLUE_LEAVES: [(Restriction, Restriction, &str); 6] = [
    (Restriction::One, Restriction::One, "1"),
    (Restriction::Zero, Restriction::Zero, "0"),
    (Restriction::Zero, Restriction::Identity, "k /\\ j"),
    (Restriction::Zero, Restriction::One, "k"),
    (Restriction::Identity, Restriction::Identity, "j"),
    (Restriction::Identity, Restriction::One, "k \\/ j"),
];

/// Classify the six elements of the free lattice on {k, j} by their
/// restrictions α(0, −) and α(1, −).
pub fn glue_case_table() -> GlueReport {
    let lat = Lattice::new(Presentation::free(&["k", "j"]), 2).expect("two generators");
    let elements = lat.enumerate_elements();
    // bit 0 = k, bit 1 = j
    let value = |f: &MonoFn, k: bool, j: bool| {
        let bits = k as u32 | (j as u32) << 1;
        let i = lat.points.iter().position(|&p| p == bits).expect("free lattice");
        f.table[i]
    };
    let mut cells = Vec::new();
    let mut placed = 0;
    for at_zero in Restriction::ALL {
        for at_one in Restriction::ALL {
            let members: Vec<String> = elements
                .iter()
                .filter(|f| {
                    Restriction::of(value(f, false, false), value(f, false, true)) == Some(at_zero)
                        && Restriction::of(value(f, true, false), value(f, true, true)) == Some(at_one)
                })
                .map(|f| lat.to_term(f).to_string())
                .collect();
            placed += members.len();
            cells.push(GlueCell {
                at_zero,
                at_one,
                members,
            });
        }
    }
    let expected = |c: &GlueCell| {
        GLUE_LEAVES
            .iter()
            .find(|(z, o, _)| *z == c.at_zero && *o == c.at_one)
            .map(|(_, _, t)| LatTerm::parse(t).expect("leaf term"))
    };
    let matches_case_tree = placed == elements.len()
        && cells.iter().all(|c| match expected(c) {
            Some(t) => {
                c.members.len() == 1
                    && lat.normal_form(&t) == lat.normal_form(&LatTerm::parse(&c.members[0]).expect("printed term"))
            }
            None => c.members.is_empty(),
        });
    let cell = |z, o| {
        cells
            .iter()
            .find(|c| c.at_zero == z && c.at_one == o)
            .expect("all cells")
    };
    let excluded_cell_empty = cell(Restriction::Identity, Restriction::Zero).members.is_empty();
    let one_leaf_is_constant = Restriction::ALL
        .iter()
        .flat_map(|o| cell(Restriction::One, *o).members.clone())
        .collect::<Vec<_>>()
        == vec!["1".to_string()];
    GlueReport {
        elements: elements.len(),
        cells,
        matches_case_tree,
        excluded_cell_empty,
        one_leaf_is_constant,
    }
}
