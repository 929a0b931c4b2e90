//! Kernel for a multimodal dependent type theory over a one-mode theory with
//! modalities `glo`, `sha` and `op`, plus decision procedures for finitely
//! presented distributive lattices and interval shape sequents.

pub mod check;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod lattice;
pub mod modality;
pub mod shapes;
pub mod syntax;
