//! End-to-end subsumption queries: transform, normalize, A-extend, saturate,
//! then read off the answer.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::classify::{
    classify, explain, ClassificationState, ClassifierConfig, ClassifyError, Entry, TraceTree,
};
use crate::kb::{Concept, KnowledgeBase, Name};
use crate::pipeline::{a_extend, normalize, transform, PipelineError};
use crate::text::print_concept;

/// Which acceptance condition made a subsumption hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    /// B ∈ S(A)
    Direct,
    /// ⊥ ∈ S(A)
    SubsumeeEmpty,
    /// ⊥ ∈ S({i}) for an individual i
    Inconsistent,
}

impl std::fmt::Display for Reason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Reason::Direct => "direct",
            Reason::SubsumeeEmpty => "subsumee-empty",
            Reason::Inconsistent => "inconsistent",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsumptionVerdict {
    pub holds: bool,
    pub reason: Option<Reason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceTree>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReasonerConfig {
    pub classifier: ClassifierConfig,
    /// Attach an explanation tree to positive verdicts.
    pub trace: bool,
}

/// Every intermediate artifact of one query.
#[derive(Clone, Debug)]
pub struct QueryRun {
    /// The saturated knowledge base: normalized and A-extended.
    pub kb: KnowledgeBase,
    pub state: ClassificationState,
    pub subsumee: Name,
    pub subsumer: Name,
    pub witness: Name,
}

impl QueryRun {
    /// The entry that decides the query, with the matching reason.
    pub fn deciding_entry(&self) -> Option<(Reason, Entry)> {
        let a = Concept::Atomic(self.subsumee);
        let b = Concept::Atomic(self.subsumer);
        if self.state.has_subsumer(&a, &b) {
            return Some((Reason::Direct, Entry::s(a, b)));
        }
        if self.state.has_subsumer(&a, &Concept::Bottom) {
            return Some((Reason::SubsumeeEmpty, Entry::s(a, Concept::Bottom)));
        }
        self.kb
            .individuals()
            .iter()
            .map(|&i| Concept::Nominal(i))
            .find(|n| self.state.has_subsumer(n, &Concept::Bottom))
            .map(|n| (Reason::Inconsistent, Entry::s(n, Concept::Bottom)))
    }
}

/// Runs the pipeline for `C ⊑ D` and saturates.
pub fn run_query(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
    config: ClassifierConfig,
) -> Result<QueryRun, ReasonerError> {
    let t = transform(kb, c, d)?;
    let normal = normalize(&t.kb)?;
    let ext = a_extend(&normal, t.subsumee)?;
    let state = classify(&ext.kb, config)?;
    Ok(QueryRun {
        kb: ext.kb,
        state,
        subsumee: t.subsumee,
        subsumer: t.subsumer,
        witness: ext.individual,
    })
}

pub fn check_subsumption(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
) -> Result<SubsumptionVerdict, ReasonerError> {
    check_subsumption_with(kb, c, d, ReasonerConfig::default())
}

pub fn check_subsumption_with(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
    config: ReasonerConfig,
) -> Result<SubsumptionVerdict, ReasonerError> {
    let run = run_query(kb, c, d, config.classifier)?;
    let Some((reason, entry)) = run.deciding_entry() else {
        return Ok(SubsumptionVerdict {
            holds: false,
            reason: None,
            trace: None,
        });
    };
    let trace = if config.trace {
        let node = explain(&run.state, &entry)?;
        let sub = format!("<{}>", print_concept(kb, c));
        let sup = format!("<{}>", print_concept(kb, d));
        let label = |n: Name| {
            if n == run.subsumee {
                sub.clone()
            } else if n == run.subsumer {
                sup.clone()
            } else {
                run.kb.label(n).to_string()
            }
        };
        Some(node.tree_with(&run.kb, &label))
    } else {
        None
    };
    Ok(SubsumptionVerdict {
        holds: true,
        reason: Some(reason),
        trace,
    })
}

/// Whether the knowledge base has a model.
pub fn is_consistent(kb: &KnowledgeBase) -> Result<bool, ReasonerError> {
    Ok(!check_subsumption(kb, &Concept::Top, &Concept::Bottom)?.holds)
}

/// All pairs of declared concept names `(X, Y)` with `X ⊑ Y`, reflexive
/// pairs included. Each pair is a separate pipeline run.
pub fn classify_names(kb: &KnowledgeBase) -> Result<BTreeSet<(Name, Name)>, ReasonerError> {
    let mut out = BTreeSet::new();
    for &x in kb.concepts() {
        for &y in kb.concepts() {
            let verdict = check_subsumption(kb, &Concept::Atomic(x), &Concept::Atomic(y))?;
            if verdict.holds {
                out.insert((x, y));
            }
        }
    }
    Ok(out)
}
