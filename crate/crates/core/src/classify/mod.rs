//! Saturation of a normalized knowledge base: the S and R maps, completion
//! rules CR1–CR11, derivation traces and their replay.

mod fixpoint;
mod index;
mod replay;
mod saturate;
mod state;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::kb::{Concept, KbError, KnowledgeBase, Name};

pub use fixpoint::find_missing;
pub use replay::{explain, replay, replay_all, ExplanationNode, ReplayError, TraceTree};
pub use saturate::saturate;
pub use state::{init_state, ClassificationState};

/// Completion rule identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    Cr1,
    Cr2,
    Cr3,
    Cr4,
    Cr5,
    Cr6,
    Cr7,
    Cr8,
    Cr9,
    Cr10,
    Cr11,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = *self as u8 + 1;
        write!(f, "CR{n}")
    }
}

/// A fact of the classification: `subsumer ∈ S(subsumee)` or
/// `(from, to) ∈ R(role)`. ⊥ appears as [`Concept::Bottom`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entry {
    S {
        subsumee: Concept,
        subsumer: Concept,
    },
    R {
        role: Name,
        from: Concept,
        to: Concept,
    },
}

impl Entry {
    pub fn s(subsumee: Concept, subsumer: Concept) -> Entry {
        Entry::S { subsumee, subsumer }
    }

    pub fn r(role: Name, from: Concept, to: Concept) -> Entry {
        Entry::R { role, from, to }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Premise {
    Entry(Entry),
    /// Index into the classified knowledge base's constraint list.
    Axiom(usize),
}

/// How an entry was produced. R-entries use the three role-tree shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    Init,
    ByRule {
        rule: Rule,
        premises: Vec<Premise>,
    },
    /// CR3: `C′ ∈ S(C)` and `C′ ⊑ ∃r.D`.
    ExistsR {
        member: Entry,
        axiom: usize,
    },
    /// CR10: an edge of a sub-role.
    TransR {
        edge: Entry,
        axiom: usize,
    },
    /// CR11: two consecutive edges under a chain inclusion.
    SplitR {
        left: Entry,
        right: Entry,
        axiom: usize,
    },
}

impl Derivation {
    pub fn rule(&self) -> Option<Rule> {
        match self {
            Derivation::Init => None,
            Derivation::ByRule { rule, .. } => Some(*rule),
            Derivation::ExistsR { .. } => Some(Rule::Cr3),
            Derivation::TransR { .. } => Some(Rule::Cr10),
            Derivation::SplitR { .. } => Some(Rule::Cr11),
        }
    }

    pub fn premises(&self) -> Vec<Premise> {
        match self {
            Derivation::Init => Vec::new(),
            Derivation::ByRule { premises, .. } => premises.clone(),
            Derivation::ExistsR { member, axiom } => {
                vec![Premise::Entry(member.clone()), Premise::Axiom(*axiom)]
            }
            Derivation::TransR { edge, axiom } => {
                vec![Premise::Entry(edge.clone()), Premise::Axiom(*axiom)]
            }
            Derivation::SplitR { left, right, axiom } => vec![
                Premise::Entry(left.clone()),
                Premise::Entry(right.clone()),
                Premise::Axiom(*axiom),
            ],
        }
    }
}

/// Saturation options.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifierConfig {
    /// Lets CR6 reachability paths start at any nominal as well as at the
    /// subsumee itself. Turning this off makes the calculus incomplete on
    /// some nominal-heavy inputs.
    pub nominal_roots: bool,
    /// Processes the worklist in a pseudo-random order derived from the seed.
    pub shuffle_seed: Option<u64>,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            nominal_roots: true,
            shuffle_seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("entry is not in the classification: {0}")]
    Absent(String),
}

/// Initializes and saturates.
pub fn classify(
    kb: &KnowledgeBase,
    config: ClassifierConfig,
) -> Result<ClassificationState, ClassifyError> {
    let state = init_state(kb, config)?;
    Ok(saturate(kb, state))
}
