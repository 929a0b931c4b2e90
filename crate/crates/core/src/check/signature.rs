//! Ordered global signature of checked declarations.

use std::collections::HashMap;

use crate::eval::{eval, Globals, Val};
use crate::syntax::{DeclKind, Declaration, Name};

#[derive(Clone)]
struct Global {
    decl: Declaration,
    ty: Val,
    value: Option<Val>,
}

#[derive(Clone, Default)]
pub struct Signature {
    globals: Vec<Global>,
    index: HashMap<Name, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.globals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.globals.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Option<&Declaration> {
        self.index.get(name).map(|&i| &self.globals[i].decl)
    }

    pub fn declarations(&self) -> impl Iterator<Item = &Declaration> {
        self.globals.iter().map(|g| &g.decl)
    }

    /// Append an already checked declaration. The caller guarantees the name
    /// is fresh.
    pub fn push(&mut self, decl: Declaration) {
        debug_assert!(!self.contains(&decl.name));
        let ty = eval(self, &Vec::new(), &decl.ty);
        let value = match &decl.kind {
            DeclKind::Definition(body) => Some(eval(self, &Vec::new(), body)),
            DeclKind::Postulate => None,
        };
        self.index.insert(decl.name.clone(), self.globals.len());
        self.globals.push(Global { decl, ty, value });
    }
}

impl Globals for Signature {
    fn definition(&self, name: &str) -> Option<Val> {
        self.index.get(name).and_then(|&i| self.globals[i].value.clone())
    }

    fn type_of(&self, name: &str) -> Option<Val> {
        self.index.get(name).map(|&i| self.globals[i].ty.clone())
    }
}
