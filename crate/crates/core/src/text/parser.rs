use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::lexer::{lex, Tok};
use super::{Span, TextError};
use crate::cdomains::{Predicate, RationalPredicate, StringPredicate};
use crate::kb::NameKind;

/// Nesting limit for concept expressions, so hostile input cannot exhaust
/// the stack.
const MAX_DEPTH: usize = 200;

pub(crate) const KEYWORDS: [&str; 5] = ["top", "bot", "and", "exists", "o"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConceptExpr {
    Top(Span),
    Bottom(Span),
    Name(Ident),
    Nominal(Ident),
    /// n-ary conjunction, n ≥ 2
    And(Vec<ConceptExpr>, Span),
    Exists(Ident, Box<ConceptExpr>, Span),
    Pred {
        predicate: Predicate,
        features: Vec<Ident>,
        span: Span,
    },
}

impl ConceptExpr {
    pub fn span(&self) -> Span {
        match self {
            ConceptExpr::Top(s) | ConceptExpr::Bottom(s) => *s,
            ConceptExpr::Name(i) | ConceptExpr::Nominal(i) => i.span,
            ConceptExpr::And(_, s) | ConceptExpr::Exists(_, _, s) => *s,
            ConceptExpr::Pred { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomExpr {
    Gci(ConceptExpr, ConceptExpr),
    RoleInclusion {
        chain: Vec<Ident>,
        sup: Ident,
    },
    /// `x <= y` with bare names: a GCI or a role inclusion depending on the
    /// declarations.
    Names(Ident, Ident),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Declare { kind: NameKind, names: Vec<Ident> },
    Axiom { axiom: AxiomExpr, span: Span },
}

/// A parsed file before name resolution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceOntology {
    pub statements: Vec<Statement>,
}

pub(crate) struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    depth: usize,
}

type PResult<T> = Result<T, TextError>;

impl Parser {
    pub(crate) fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            depth: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(TextError::new(
            self.span(),
            format!("unexpected {}", self.peek().describe()),
        )
        .expecting(expected))
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.advance().1)
        } else {
            self.unexpected(&[&tok.describe()])
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                let span = self.advance().1;
                Ok(Ident { name, span })
            }
            _ => self.unexpected(&[what]),
        }
    }

    /// Whole file; on errors, skips to the next line and keeps going so that
    /// every bad statement is reported.
    pub(crate) fn file(&mut self) -> Result<SourceOntology, Vec<TextError>> {
        let mut statements = Vec::new();
        let mut errors = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Newline => {
                    self.advance();
                    continue;
                }
                _ => {}
            }
            match self.statement() {
                Ok(s) => statements.push(s),
                Err(e) => {
                    errors.push(e);
                    while !matches!(self.peek(), Tok::Newline | Tok::Eof) {
                        self.advance();
                    }
                }
            }
        }
        if errors.is_empty() {
            Ok(SourceOntology { statements })
        } else {
            Err(errors)
        }
    }

    fn end_of_statement(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Newline => {
                self.advance();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => self.unexpected(&["end of line"]),
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        let kind = match self.peek() {
            Tok::Ident(s) => NameKind::ALL.into_iter().find(|k| k.keyword() == s),
            _ => None,
        };
        if let Some(kind) = kind {
            self.advance();
            let mut names = vec![self.ident("name")?];
            loop {
                match self.peek() {
                    Tok::Comma => {
                        self.advance();
                        names.push(self.ident("name")?);
                    }
                    Tok::Ident(_) => names.push(self.ident("name")?),
                    _ => break,
                }
            }
            self.end_of_statement()?;
            return Ok(Statement::Declare { kind, names });
        }
        if !self.is_keyword("axiom") {
            return self.unexpected(&[
                "`concept`",
                "`role`",
                "`individual`",
                "`feature`",
                "`axiom`",
            ]);
        }
        let span = self.advance().1;
        let axiom = self.axiom()?;
        self.end_of_statement()?;
        Ok(Statement::Axiom { axiom, span })
    }

    fn axiom(&mut self) -> PResult<AxiomExpr> {
        let lhs = self.concept()?;
        if let (ConceptExpr::Name(first), true) = (&lhs, self.is_keyword("o")) {
            let mut chain = vec![first.clone()];
            while self.is_keyword("o") {
                self.advance();
                chain.push(self.ident("role name")?);
            }
            self.expect(Tok::Le)?;
            let sup = self.ident("role name")?;
            return Ok(AxiomExpr::RoleInclusion { chain, sup });
        }
        if *self.peek() != Tok::Le {
            let mut expected = vec!["`<=`"];
            if matches!(lhs, ConceptExpr::Name(_)) {
                expected.push("`o`");
            }
            return self.unexpected(&expected);
        }
        self.advance();
        let rhs = self.concept()?;
        Ok(match (lhs, rhs) {
            (ConceptExpr::Name(a), ConceptExpr::Name(b)) => AxiomExpr::Names(a, b),
            (lhs, rhs) => AxiomExpr::Gci(lhs, rhs),
        })
    }

    pub(crate) fn concept(&mut self) -> PResult<ConceptExpr> {
        if self.depth >= MAX_DEPTH {
            return Err(TextError::new(self.span(), "concept nested too deeply"));
        }
        self.depth += 1;
        let out = self.concept_inner();
        self.depth -= 1;
        out
    }

    fn concept_inner(&mut self) -> PResult<ConceptExpr> {
        const EXPECTED: [&str; 6] = ["`top`", "`bot`", "concept name", "`{`", "`(`", "predicate"];
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) if s == "top" => {
                self.advance();
                Ok(ConceptExpr::Top(span))
            }
            Tok::Ident(s) if s == "bot" => {
                self.advance();
                Ok(ConceptExpr::Bottom(span))
            }
            Tok::Ident(s) if (s == "Q" || s == "S") && *self.peek_at(1) == Tok::Dot => {
                self.predicate()
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                Ok(ConceptExpr::Name(self.ident("concept name")?))
            }
            Tok::LBrace => {
                self.advance();
                let a = self.ident("individual name")?;
                self.expect(Tok::RBrace)?;
                Ok(ConceptExpr::Nominal(a))
            }
            Tok::LParen => {
                self.advance();
                if self.is_keyword("exists") {
                    self.advance();
                    let r = self.ident("role name")?;
                    self.expect(Tok::Dot)?;
                    let filler = self.concept()?;
                    self.expect(Tok::RParen)?;
                    return Ok(ConceptExpr::Exists(r, Box::new(filler), span));
                }
                let mut parts = vec![self.concept()?];
                while self.is_keyword("and") {
                    self.advance();
                    parts.push(self.concept()?);
                }
                if parts.len() < 2 {
                    return self.unexpected(&["`and`"]);
                }
                self.expect(Tok::RParen)?;
                Ok(ConceptExpr::And(parts, span))
            }
            _ => self.unexpected(&EXPECTED),
        }
    }

    fn predicate(&mut self) -> PResult<ConceptExpr> {
        let (dom, span) = match self.advance() {
            (Tok::Ident(s), span) => (s, span),
            _ => unreachable!("caller checked the domain prefix"),
        };
        self.expect(Tok::Dot)?;
        let pspan = self.span();
        let pname = match self.advance() {
            (Tok::Ident(p), _) => p,
            _ => {
                self.pos -= 1;
                return self.unexpected(&["predicate name"]);
            }
        };
        let unknown = |known: &str| {
            Err(
                TextError::new(pspan, format!("unknown predicate {dom}.{pname}"))
                    .expecting(&[known]),
            )
        };
        let predicate = if dom == "Q" {
            Predicate::Rational(match pname.as_str() {
                "top" => RationalPredicate::Top,
                "same" => RationalPredicate::Same,
                "eq" => RationalPredicate::Eq(self.rational_param()?),
                "gt" => RationalPredicate::Gt(self.rational_param()?),
                "plus" => RationalPredicate::Plus(self.rational_param()?),
                _ => return unknown("`top`, `eq`, `gt`, `plus` or `same`"),
            })
        } else {
            Predicate::String(match pname.as_str() {
                "top" => StringPredicate::Top,
                "same" => StringPredicate::Same,
                "eq" => StringPredicate::Eq(self.string_param()?),
                "concat" => StringPredicate::Concat(self.string_param()?),
                _ => return unknown("`top`, `eq`, `concat` or `same`"),
            })
        };
        self.expect(Tok::LParen)?;
        let mut features = vec![self.ident("feature name")?];
        while *self.peek() == Tok::Comma {
            self.advance();
            features.push(self.ident("feature name")?);
        }
        self.expect(Tok::RParen)?;
        Ok(ConceptExpr::Pred {
            predicate,
            features,
            span,
        })
    }

    fn int(&mut self) -> PResult<BigInt> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.advance();
                Ok(s.parse().expect("lexer only produces decimal integers"))
            }
            _ => self.unexpected(&["integer"]),
        }
    }

    fn rational_param(&mut self) -> PResult<BigRational> {
        self.expect(Tok::LBracket)?;
        let num = self.int()?;
        let q = if *self.peek() == Tok::Slash {
            self.advance();
            let span = self.span();
            let den = self.int()?;
            if !den.is_positive() || den.is_zero() {
                return Err(TextError::new(
                    span,
                    "denominator must be a positive integer",
                ));
            }
            BigRational::new(num, den)
        } else {
            BigRational::from_integer(num)
        };
        self.expect(Tok::RBracket)?;
        Ok(q)
    }

    fn string_param(&mut self) -> PResult<String> {
        self.expect(Tok::LBracket)?;
        let s = match self.peek().clone() {
            Tok::Str(s) => {
                self.advance();
                s
            }
            _ => return self.unexpected(&["string literal"]),
        };
        self.expect(Tok::RBracket)?;
        Ok(s)
    }

    /// A lone concept followed by end of input.
    pub(crate) fn single_concept(&mut self) -> PResult<ConceptExpr> {
        while *self.peek() == Tok::Newline {
            self.advance();
        }
        let c = self.concept()?;
        while *self.peek() == Tok::Newline {
            self.advance();
        }
        if *self.peek() != Tok::Eof {
            return self.unexpected(&["end of input"]);
        }
        Ok(c)
    }
}
