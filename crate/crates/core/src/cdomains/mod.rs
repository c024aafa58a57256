//! Concrete domains: the pluggable descriptor trait, the rational-number
//! domain `Q` and the string domain `S`.
//!
//! Each domain exposes arities, predicate application, a satisfiability
//! decider that returns witnesses, and an implication decider for single
//! atom goals. Predicate names carry their constants, so `Q.eq[2]` and
//! `Q.eq[3]` are different predicates of the same domain.

mod linear;
mod rational;
mod string;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::kb::Name;

pub use rational::{RationalDomain, RationalPredicate};
pub use string::{StringDomain, StringPredicate};

/// Identifier of a registered concrete domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DomainId {
    Rational,
    String,
}

impl DomainId {
    pub fn prefix(self) -> &'static str {
        match self {
            DomainId::Rational => "Q",
            DomainId::String => "S",
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

/// A predicate name of some domain. The two domains' name sets are disjoint
/// by construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    Rational(RationalPredicate),
    String(StringPredicate),
}

impl Predicate {
    pub fn domain(&self) -> DomainId {
        match self {
            Predicate::Rational(_) => DomainId::Rational,
            Predicate::String(_) => DomainId::String,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Rational(p) => write!(f, "Q.{p}"),
            Predicate::String(p) => write!(f, "S.{p}"),
        }
    }
}

/// A concrete value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Rational(BigRational),
    String(String),
}

impl Value {
    pub fn domain(&self) -> DomainId {
        match self {
            Value::Rational(_) => DomainId::Rational,
            Value::String(_) => DomainId::String,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rational(q) => write!(f, "{q}"),
            Value::String(s) => write!(f, "{s:?}"),
        }
    }
}

/// `p(f1, …, fk)`: a predicate applied to feature names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredicateAtom {
    pub predicate: Predicate,
    pub features: Vec<Name>,
}

impl PredicateAtom {
    pub fn new(predicate: Predicate, features: Vec<Name>) -> Self {
        PredicateAtom {
            predicate,
            features,
        }
    }

    pub fn domain(&self) -> DomainId {
        self.predicate.domain()
    }

    /// Evaluates the atom under an assignment. Undefined features make the
    /// atom false.
    pub fn holds(&self, assignment: &Assignment) -> bool {
        let values: Option<Vec<Value>> = self
            .features
            .iter()
            .map(|f| assignment.get(f).cloned())
            .collect();
        match values {
            Some(vs) => domain(self.domain())
                .apply(&self.predicate, &vs)
                .unwrap_or(false),
            None => false,
        }
    }
}

/// Partial map from feature names to values.
pub type Assignment = BTreeMap<Name, Value>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Satisfiability {
    Sat(Assignment),
    Unsat,
}

impl Satisfiability {
    pub fn is_sat(&self) -> bool {
        matches!(self, Satisfiability::Sat(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("predicate {predicate} does not belong to domain {domain}")]
    ForeignPredicate { domain: DomainId, predicate: String },
    #[error("{predicate} expects {expected} value(s), got {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("value {value} is not in domain {domain}")]
    ForeignValue { domain: DomainId, value: String },
}

/// A concrete domain descriptor with its deciders.
pub trait ConcreteDomain: Sync {
    fn id(&self) -> DomainId;

    fn owns(&self, p: &Predicate) -> bool {
        p.domain() == self.id()
    }

    fn arity(&self, p: &Predicate) -> Result<usize, DomainError>;

    /// Truth of `p` on `values`.
    fn apply(&self, p: &Predicate, values: &[Value]) -> Result<bool, DomainError>;

    /// Decides the conjunction; on success the witness satisfies every atom.
    fn satisfiable(&self, conj: &[PredicateAtom]) -> Result<Satisfiability, DomainError>;

    /// An assignment satisfying `conj` but not `goal`, if one exists.
    fn refute(
        &self,
        conj: &[PredicateAtom],
        goal: &PredicateAtom,
    ) -> Result<Option<Assignment>, DomainError>;

    /// True iff every assignment satisfying `conj` satisfies `goal`.
    fn implies(&self, conj: &[PredicateAtom], goal: &PredicateAtom) -> Result<bool, DomainError> {
        Ok(self.refute(conj, goal)?.is_none())
    }
}

static RATIONALS: RationalDomain = RationalDomain;
static STRINGS: StringDomain = StringDomain;

/// The descriptor for a registered domain id.
pub fn domain(id: DomainId) -> &'static dyn ConcreteDomain {
    match id {
        DomainId::Rational => &RATIONALS,
        DomainId::String => &STRINGS,
    }
}

pub fn apply_predicate(p: &Predicate, values: &[Value]) -> Result<bool, DomainError> {
    domain(p.domain()).apply(p, values)
}

pub fn arity(p: &Predicate) -> usize {
    domain(p.domain())
        .arity(p)
        .expect("a predicate always belongs to its own domain")
}

pub(crate) fn foreign(dom: DomainId, p: &Predicate) -> DomainError {
    DomainError::ForeignPredicate {
        domain: dom,
        predicate: p.to_string(),
    }
}

pub(crate) fn feature_set(conj: &[PredicateAtom]) -> BTreeSet<Name> {
    conj.iter()
        .flat_map(|a| a.features.iter().copied())
        .collect()
}
