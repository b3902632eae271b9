//! Concrete syntax: lexer, parser, printer and obligation manifests.

mod lexer;
pub mod manifest;
mod parser;
mod print;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::term::{Formula, Term};

pub use manifest::{parse_manifest, write_manifest, ManifestError};
pub use print::canonical_display;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub name: Arc<str>,
    pub params: Vec<Term>,
    pub body: Formula,
    pub span: Span,
}

impl Clause {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceProgram {
    pub file: Option<Arc<str>>,
    pub clauses: Vec<Clause>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("line {line}, column {col}: unexpected character `{ch}`")]
    Char { line: u32, col: u32, ch: char },
    #[error("line {line}, column {col}: expected {expected}, found {found}")]
    Unexpected {
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },
    #[error("line {line}, column {col}: {message}")]
    Invalid {
        line: u32,
        col: u32,
        message: String,
    },
    #[error(
        "line {line}, column {col}: duplicate definition of {name}/{arity} \
         (first defined at line {first_line}, column {first_col})"
    )]
    Duplicate {
        name: String,
        arity: usize,
        line: u32,
        col: u32,
        first_line: u32,
        first_col: u32,
    },
}

impl SyntaxError {
    pub fn position(&self) -> (u32, u32) {
        match self {
            SyntaxError::Char { line, col, .. }
            | SyntaxError::Unexpected { line, col, .. }
            | SyntaxError::Invalid { line, col, .. }
            | SyntaxError::Duplicate { line, col, .. } => (*line, *col),
        }
    }
}

pub fn parse_program(text: &str) -> Result<SourceProgram, SyntaxError> {
    parser::Parser::new(text)?.program()
}

/// Parses a program and records `file` as its origin.
pub fn parse_program_named(text: &str, file: &str) -> Result<SourceProgram, SyntaxError> {
    let mut p = parse_program(text)?;
    p.file = Some(Arc::from(file));
    Ok(p)
}

/// Parses a formula terminated by `.`.
pub fn parse_goal(text: &str) -> Result<Formula, SyntaxError> {
    parser::Parser::new(text)?.goal()
}

/// Parses a single term (no terminating `.`).
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    parser::Parser::new(text)?.term_only()
}

/// Parses a term whose variable ids depend only on their names, so that
/// terms parsed separately share variables.
#[cfg(test)]
pub(crate) fn term_by_name(text: &str) -> Term {
    let t = parse_term(text).unwrap();
    let map = t
        .free_vars()
        .into_iter()
        .map(|v| {
            let id = v
                .name
                .bytes()
                .fold(0u32, |h, b| h.wrapping_mul(131).wrapping_add(u32::from(b)))
                | (1 << 20);
            (
                v.clone(),
                Term::Var(crate::term::Var::new(id % (1 << 24), &v.name)),
            )
        })
        .collect();
    t.rename(&map)
}
