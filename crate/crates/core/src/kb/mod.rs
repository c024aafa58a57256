//! Names, concept descriptions, constraints and knowledge bases.

mod concept;
mod name;

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::cdomains::{self, DomainId};

pub use concept::{is_basic, Concept, Constraint};
pub use name::{fresh_name, Name, NameKind, SymbolTable};

/// A structured well-formedness violation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("unknown {kind} name `{label}`")]
    UnknownName { kind: NameKind, label: String },
    #[error("unknown predicate {predicate}: domain {domain} is not registered")]
    UnknownPredicate { domain: DomainId, predicate: String },
    #[error("arity mismatch: {predicate} takes {expected} feature(s), got {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("role inclusion with an empty chain")]
    EmptyChain,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("invalid knowledge base: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("{label} is not a declared {kind}")]
    Undeclared { kind: NameKind, label: String },
    #[error("knowledge base is not in normal form: {0}")]
    NotNormal(String),
}

fn join_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Concepts restricted to ⊤, names, nominals and predicate applications,
/// in first-occurrence order with ⊤ first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicConceptSet(IndexSet<Concept>);

impl BasicConceptSet {
    pub fn contains(&self, c: &Concept) -> bool {
        self.0.contains(c)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Concept> {
        self.0.iter()
    }

    pub fn index_of(&self, c: &Concept) -> Option<usize> {
        self.0.get_index_of(c)
    }

    pub fn get(&self, i: usize) -> Option<&Concept> {
        self.0.get_index(i)
    }
}

/// Name inventories plus an ordered constraint list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeBase {
    symbols: SymbolTable,
    inventory: [BTreeSet<Name>; 4],
    domains: BTreeSet<DomainId>,
    pub constraints: Vec<Constraint>,
}

impl Default for KnowledgeBase {
    fn default() -> Self {
        KnowledgeBase {
            symbols: SymbolTable::new(),
            inventory: Default::default(),
            domains: [DomainId::Rational, DomainId::String].into_iter().collect(),
            constraints: Vec::new(),
        }
    }
}

fn slot(kind: NameKind) -> usize {
    NameKind::ALL.iter().position(|&k| k == kind).unwrap()
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// A knowledge base with only the given concrete domains registered.
    pub fn with_domains(domains: impl IntoIterator<Item = DomainId>) -> Self {
        KnowledgeBase {
            domains: domains.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn domains(&self) -> &BTreeSet<DomainId> {
        &self.domains
    }

    /// Interns `label` and adds it to the matching inventory.
    pub fn declare(&mut self, kind: NameKind, label: &str) -> Name {
        let n = self.symbols.intern(kind, label);
        self.inventory[slot(kind)].insert(n);
        n
    }

    /// Interns `label` without declaring it.
    pub fn intern(&mut self, kind: NameKind, label: &str) -> Name {
        self.symbols.intern(kind, label)
    }

    /// Declares a brand-new name whose label starts with `prefix`.
    pub fn declare_fresh(&mut self, kind: NameKind, prefix: &str) -> Name {
        let n = self.symbols.fresh(kind, prefix);
        self.inventory[slot(kind)].insert(n);
        n
    }

    pub fn concept(&mut self, label: &str) -> Concept {
        Concept::Atomic(self.declare(NameKind::Concept, label))
    }

    pub fn role(&mut self, label: &str) -> Name {
        self.declare(NameKind::Role, label)
    }

    pub fn nominal(&mut self, label: &str) -> Concept {
        Concept::Nominal(self.declare(NameKind::Individual, label))
    }

    pub fn feature(&mut self, label: &str) -> Name {
        self.declare(NameKind::Feature, label)
    }

    pub fn lookup(&self, kind: NameKind, label: &str) -> Option<Name> {
        self.symbols
            .lookup(kind, label)
            .filter(|n| self.is_declared(*n))
    }

    pub fn label(&self, name: Name) -> &str {
        self.symbols.label(name)
    }

    pub fn is_declared(&self, name: Name) -> bool {
        self.inventory[slot(name.kind())].contains(&name)
    }

    pub fn inventory(&self, kind: NameKind) -> &BTreeSet<Name> {
        &self.inventory[slot(kind)]
    }

    pub fn concepts(&self) -> &BTreeSet<Name> {
        self.inventory(NameKind::Concept)
    }

    pub fn roles(&self) -> &BTreeSet<Name> {
        self.inventory(NameKind::Role)
    }

    pub fn individuals(&self) -> &BTreeSet<Name> {
        self.inventory(NameKind::Individual)
    }

    pub fn features(&self) -> &BTreeSet<Name> {
        self.inventory(NameKind::Feature)
    }

    /// All declared names of every kind.
    pub fn all_names(&self) -> Vec<Name> {
        self.inventory.iter().flatten().copied().collect()
    }

    pub fn add(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn add_gci(&mut self, lhs: Concept, rhs: Concept) {
        self.constraints.push(Constraint::gci(lhs, rhs));
    }

    pub fn gcis(&self) -> impl Iterator<Item = (&Concept, &Concept)> {
        self.constraints.iter().filter_map(|c| match c {
            Constraint::Gci { lhs, rhs } => Some((lhs, rhs)),
            _ => None,
        })
    }

    /// ⊤ plus every basic sub-description of every GCI, in first-occurrence
    /// order. Declared-but-unused names are not included.
    pub fn basic_concepts(&self) -> BasicConceptSet {
        let mut set = IndexSet::new();
        set.insert(Concept::Top);
        for (lhs, rhs) in self.gcis() {
            for side in [lhs, rhs] {
                side.walk(&mut |c| {
                    if c.is_basic() && !set.contains(c) {
                        set.insert(c.clone());
                    }
                });
            }
        }
        BasicConceptSet(set)
    }

    /// Checks name closure and predicate well-formedness for the constraints.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        for c in &self.constraints {
            self.collect_violations(c, &mut out);
        }
        out.dedup();
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// Validation of a single description against this knowledge base.
    pub fn validate_concept(&self, c: &Concept) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        self.concept_violations(c, &mut out);
        out.dedup();
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub(crate) fn ensure_valid(&self) -> Result<(), KbError> {
        self.validate().map_err(KbError::Invalid)
    }

    fn name_violation(&self, n: Name, out: &mut Vec<Violation>) {
        if !self.is_declared(n) {
            out.push(Violation::UnknownName {
                kind: n.kind(),
                label: self.label(n).to_string(),
            });
        }
    }

    fn collect_violations(&self, c: &Constraint, out: &mut Vec<Violation>) {
        match c {
            Constraint::Gci { lhs, rhs } => {
                self.concept_violations(lhs, out);
                self.concept_violations(rhs, out);
            }
            Constraint::RoleInclusion { chain, sup } => {
                if chain.is_empty() {
                    out.push(Violation::EmptyChain);
                }
                for &r in chain.iter().chain(std::iter::once(sup)) {
                    self.name_violation(r, out);
                }
            }
        }
    }

    fn concept_violations(&self, c: &Concept, out: &mut Vec<Violation>) {
        c.walk(&mut |d| match d {
            Concept::Atomic(n) | Concept::Nominal(n) | Concept::Exists(n, _) => {
                self.name_violation(*n, out)
            }
            Concept::Pred(atom) => {
                for &f in &atom.features {
                    self.name_violation(f, out);
                }
                let dom = atom.predicate.domain();
                if !self.domains.contains(&dom) {
                    out.push(Violation::UnknownPredicate {
                        domain: dom,
                        predicate: atom.predicate.to_string(),
                    });
                    return;
                }
                let expected = cdomains::domain(dom)
                    .arity(&atom.predicate)
                    .expect("predicate belongs to its own domain");
                if expected != atom.features.len() {
                    out.push(Violation::ArityMismatch {
                        predicate: atom.predicate.to_string(),
                        expected,
                        found: atom.features.len(),
                    });
                }
            }
            _ => {}
        });
    }

    /// Display adapter rendering a description with this kb's labels.
    pub fn show<'a>(&'a self, c: &'a Concept) -> ShowConcept<'a> {
        ShowConcept { kb: self, c }
    }
}

pub struct ShowConcept<'a> {
    kb: &'a KnowledgeBase,
    c: &'a Concept,
}

impl fmt::Display for ShowConcept<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_concept(self.kb, self.c))
    }
}
