//! The one-object, poset-enriched mode theory of triangulated type theory.
//!
//! Three generators `glo` (global points), `sha` (its right adjoint) and
//! `op` (opposite) subject to
//!
//! ```text
//! glo = glo∘glo = glo∘sha = glo∘op
//! sha = sha∘glo = sha∘sha = sha∘op
//! glo ≤ id = op∘op ≤ sha
//! ```
//!
//! Every word reduces to an optional leading `op` followed by an optional
//! `glo` or `sha`, so there are exactly six modalities.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// A generating 1-cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Generator {
    Glo,
    Sha,
    Op,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Glo, Generator::Sha, Generator::Op];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Glo => "glo",
            Generator::Sha => "sha",
            Generator::Op => "op",
        }
    }
}

/// A word in the generators. `letters[0]` is the outermost modality, so
/// `[a, b, c]` denotes `a∘b∘c`; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModalityWord {
    pub letters: Vec<Generator>,
}

impl ModalityWord {
    pub fn new(letters: Vec<Generator>) -> Self {
        ModalityWord { letters }
    }

    pub fn normalize(&self) -> Modality {
        normalize(self)
    }
}

/// A canonical modality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Modality {
    Id,
    Op,
    Glo,
    Sha,
    OpGlo,
    OpSha,
}

impl Modality {
    pub const ALL: [Modality; 6] = [
        Modality::Id,
        Modality::Op,
        Modality::Glo,
        Modality::Sha,
        Modality::OpGlo,
        Modality::OpSha,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn from_generator(g: Generator) -> Modality {
        match g {
            Generator::Glo => Modality::Glo,
            Generator::Sha => Modality::Sha,
            Generator::Op => Modality::Op,
        }
    }

    /// The canonical word for this modality.
    pub fn word(self) -> ModalityWord {
        use Generator::*;
        let letters = match self {
            Modality::Id => vec![],
            Modality::Op => vec![Op],
            Modality::Glo => vec![Glo],
            Modality::Sha => vec![Sha],
            Modality::OpGlo => vec![Op, Glo],
            Modality::OpSha => vec![Op, Sha],
        };
        ModalityWord { letters }
    }

    /// `self ∘ other`.
    pub fn compose(self, other: Modality) -> Modality {
        compose(self, other)
    }

    pub fn leq(self, other: Modality) -> bool {
        leq(self, other)
    }

    pub fn is_id(self) -> bool {
        self == Modality::Id
    }
}

/// Split a canonical form into (leading op?, trailing glo/sha).
fn parts(m: Modality) -> (bool, Option<Generator>) {
    match m {
        Modality::Id => (false, None),
        Modality::Op => (true, None),
        Modality::Glo => (false, Some(Generator::Glo)),
        Modality::Sha => (false, Some(Generator::Sha)),
        Modality::OpGlo => (true, Some(Generator::Glo)),
        Modality::OpSha => (true, Some(Generator::Sha)),
    }
}

fn from_parts(op: bool, tail: Option<Generator>) -> Modality {
    match (op, tail) {
        (false, None) => Modality::Id,
        (true, None) => Modality::Op,
        (false, Some(Generator::Glo)) => Modality::Glo,
        (false, Some(Generator::Sha)) => Modality::Sha,
        (true, Some(Generator::Glo)) => Modality::OpGlo,
        (true, Some(Generator::Sha)) => Modality::OpSha,
        (_, Some(Generator::Op)) => unreachable!("op is never a tail"),
    }
}

/// Reduce a word to its canonical form. Reading outermost-first, `op`s
/// toggle parity until the first `glo`/`sha`, which absorbs the rest.
pub fn normalize(w: &ModalityWord) -> Modality {
    let mut op = false;
    for &g in &w.letters {
        match g {
            Generator::Op => op = !op,
            absorbing => return from_parts(op, Some(absorbing)),
        }
    }
    from_parts(op, None)
}

/// Canonical form of `a∘b`.
pub fn compose(a: Modality, b: Modality) -> Modality {
    let (a_op, a_tail) = parts(a);
    if a_tail.is_some() {
        return a;
    }
    let (b_op, b_tail) = parts(b);
    from_parts(a_op ^ b_op, b_tail)
}

// Rows and columns follow `Modality::ALL`: Id, Op, Glo, Sha, OpGlo, OpSha.
// The least preorder containing glo ≤ id and id ≤ sha that is closed under
// composition on both sides; `tests` re-derive it. It is not antisymmetric:
// whiskering by op∘glo (resp. op∘sha) gives glo ≅ op∘glo and sha ≅ op∘sha.
const LEQ_TABLE: [[bool; 6]; 6] = [
    // Id    Op     Glo    Sha   OpGlo  OpSha
    [true, false, false, true, false, true],  // Id
    [false, true, false, true, false, true],  // Op
    [true, true, true, true, true, true],     // Glo
    [false, false, false, true, false, true], // Sha
    [true, true, true, true, true, true],     // OpGlo
    [false, false, false, true, false, true], // OpSha
];

/// The 2-cell order on canonical modalities.
pub fn leq(a: Modality, b: Modality) -> bool {
    LEQ_TABLE[a.index()][b.index()]
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Modality::Id => "id",
            Modality::Op => "op",
            Modality::Glo => "glo",
            Modality::Sha => "sha",
            Modality::OpGlo => "op∘glo",
            Modality::OpSha => "op∘sha",
        };
        f.write_str(s)
    }
}

impl fmt::Display for ModalityWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("id");
        }
        let names: Vec<_> = self.letters.iter().map(|g| g.name()).collect();
        f.write_str(&names.join("∘"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad modality `{text}`: {reason}")]
pub struct ModalityParseError {
    pub text: String,
    pub reason: String,
}

impl FromStr for ModalityWord {
    type Err = ModalityParseError;

    /// Parses `id`, `op`, `glo`, `sha` joined by `∘` or `.`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ModalityParseError {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(err("empty modality"));
        }
        let mut letters = Vec::new();
        for part in trimmed.split(['∘', '.']) {
            match part.trim() {
                "id" => {}
                "op" => letters.push(Generator::Op),
                "glo" => letters.push(Generator::Glo),
                "sha" => letters.push(Generator::Sha),
                "" => return Err(err("missing factor")),
                other => return Err(err(&format!("unknown generator `{other}`"))),
            }
        }
        Ok(ModalityWord { letters })
    }
}

impl FromStr for Modality {
    type Err = ModalityParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<ModalityWord>().map(|w| normalize(&w))
    }
}
