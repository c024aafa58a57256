//! The ontology text format.
//!
//! ```text
//! # comments run to the end of the line
//! concept X A
//! role r1
//! individual b, c
//! feature age
//! axiom X <= {b}
//! axiom A <= (exists r1 . (X and Q.gt[18](age)))
//! axiom r1 o r1 <= r1
//! ```
//!
//! Declarations are mandatory and may appear anywhere in the file.
//! Conjunctions are n-ary and associate to the left. Predicates are written
//! `Q.top(f)`, `Q.eq[q](f)`, `Q.gt[q](f)`, `Q.plus[q](f, g)`, `Q.same(f, g)`,
//! `S.top(f)`, `S.eq["w"](f)`, `S.concat["w"](f, g)` and `S.same(f, g)`,
//! with rationals as `int` or `int/posint`.

mod lexer;
mod lower;
mod parser;
mod print;

use std::fmt;

use crate::kb::{Concept, KnowledgeBase};

pub use parser::{AxiomExpr, ConceptExpr, Ident, SourceOntology, Statement};
pub use print::{
    print_concept, print_concept_with, print_constraint, print_constraint_with, print_kb,
};

/// 1-based line and column (in characters).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A lexical, syntactic or name-resolution error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextError {
    pub span: Span,
    pub message: String,
    /// What the parser would have accepted here; empty for lowering errors.
    pub expected: Vec<String>,
}

impl TextError {
    pub(crate) fn new(span: Span, message: impl Into<String>) -> Self {
        TextError {
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    pub(crate) fn expecting(mut self, expected: &[&str]) -> Self {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }
}

impl fmt::Display for TextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for TextError {}

/// Parses without resolving names.
pub fn parse_ontology(src: &str) -> Result<SourceOntology, Vec<TextError>> {
    parser::Parser::new(src).map_err(|e| vec![e])?.file()
}

/// Parses and lowers to a knowledge base.
pub fn parse_kb(src: &str) -> Result<KnowledgeBase, Vec<TextError>> {
    parse_ontology(src)?.lower()
}

/// Parses a single concept over `kb`'s declared names.
pub fn parse_concept(src: &str, kb: &KnowledgeBase) -> Result<Concept, Vec<TextError>> {
    let expr = parser::Parser::new(src)
        .and_then(|mut p| p.single_concept())
        .map_err(|e| vec![e])?;
    lower::lower_concept(kb, &expr)
}
