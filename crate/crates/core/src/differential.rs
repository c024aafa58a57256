//! Cross-checks reasoner verdicts against the countermodel search.
//!
//! A `true` verdict is refuted by any model found. A `false` verdict is
//! confirmed only by a model found within the size bound; if the canonical
//! model argument holds, one always exists with at most one element per
//! basic concept of the saturated knowledge base, so the default bound is
//! that count plus one.
//!
//! When the exhaustive search runs out of budget, the shaped search (one
//! committed witness per existential filler) decides instead, and the report
//! says so.

use serde::Serialize;
use thiserror::Error;

use crate::classify::{replay_all, ClassifierConfig, ReplayError};
use crate::kb::{Concept, KnowledgeBase};
use crate::oracle::{
    candidate_values, find_countermodel, find_shaped_countermodel, OracleError, SearchOutcome,
};
use crate::reasoner::{run_query, ReasonerError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DifferentialConfig {
    /// Largest domain tried; `None` means the canonical bound.
    pub max_model_size: Option<usize>,
    pub budget: u64,
    pub classifier: ClassifierConfig,
}

impl Default for DifferentialConfig {
    fn default() -> Self {
        DifferentialConfig {
            max_model_size: None,
            budget: 200_000,
            classifier: ClassifierConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    /// Both say the subsumption holds.
    AgreeTrue,
    /// Both say it fails: a countermodel was found.
    AgreeFalse,
    /// The reasoner says it holds but a countermodel exists.
    Unsound,
    /// The reasoner says it fails but no model within the bound refutes it.
    Incomplete,
    /// The search ran out of budget before deciding.
    Inconclusive,
}

impl Agreement {
    pub fn is_disagreement(self) -> bool {
        matches!(self, Agreement::Unsound | Agreement::Incomplete)
    }
}

#[derive(Clone, Debug)]
pub struct DifferentialReport {
    pub holds: bool,
    pub agreement: Agreement,
    pub bound: usize,
    pub outcome: SearchOutcome,
    /// Whether the shaped search decided after the exhaustive one gave up.
    pub shaped: bool,
}

#[derive(Debug, Error)]
pub enum DifferentialError {
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("derivation failed to replay: {0}")]
    Replay(#[from] ReplayError),
}

/// Decides `c ⊑ d` with the reasoner, replays every derivation, and asks the
/// oracle for a countermodel.
pub fn differential(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
    config: DifferentialConfig,
) -> Result<DifferentialReport, DifferentialError> {
    let run = run_query(kb, c, d, config.classifier)?;
    if let Some((_, e)) = replay_all(&run.kb, &run.state).into_iter().next() {
        return Err(e.into());
    }
    let holds = run.deciding_entry().is_some();
    let bound = config
        .max_model_size
        .unwrap_or(run.kb.basic_concepts().len() + 1);
    let pools = candidate_values(kb, &[c, d]);
    let mut outcome = find_countermodel(kb, c, d, bound, &pools, config.budget)?;
    let shaped = outcome == SearchOutcome::BudgetExceeded;
    if shaped {
        outcome = find_shaped_countermodel(kb, c, d, &pools, config.budget)?;
    }
    let agreement = match (&outcome, holds) {
        (SearchOutcome::BudgetExceeded, _) => Agreement::Inconclusive,
        (SearchOutcome::Found(_), true) => Agreement::Unsound,
        (SearchOutcome::Found(_), false) => Agreement::AgreeFalse,
        (SearchOutcome::NotFound, true) => Agreement::AgreeTrue,
        (SearchOutcome::NotFound, false) => Agreement::Incomplete,
    };
    Ok(DifferentialReport {
        holds,
        agreement,
        bound,
        outcome,
        shaped,
    })
}
