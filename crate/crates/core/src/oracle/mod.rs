//! Model-theoretic semantics on explicit finite interpretations, and a
//! bounded countermodel search.

mod pools;
mod search;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cdomains::Value;
use crate::kb::{Concept, Constraint, KnowledgeBase, Name};

pub use pools::{candidate_values, CandidatePools};
pub use search::{find_countermodel, find_shaped_countermodel, SearchOutcome, DEFAULT_BUDGET};

/// A finite interpretation over the domain `{0, …, size − 1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteInterpretation {
    pub size: usize,
    pub concepts: BTreeMap<Name, BTreeSet<usize>>,
    pub roles: BTreeMap<Name, BTreeSet<(usize, usize)>>,
    pub individuals: BTreeMap<Name, usize>,
    /// Partial maps from elements to concrete values.
    pub features: BTreeMap<Name, BTreeMap<usize, Value>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{kind} `{id}` is not interpreted", kind = .0.kind(), id = .0.id())]
    Uninterpreted(Name),
    #[error("interpretation domains are nonempty")]
    EmptyDomain,
    #[error("individual mapped outside the domain")]
    OutOfDomain,
    #[error("search produced a candidate that fails verification")]
    InvalidCandidate,
}

impl FiniteInterpretation {
    /// An interpretation of every declared name of `kb` with all concept,
    /// role and feature maps empty and every individual at element 0.
    pub fn empty_for(kb: &KnowledgeBase, size: usize) -> Self {
        let mut i = FiniteInterpretation {
            size,
            ..Default::default()
        };
        i.cover(kb);
        i
    }

    /// Adds empty entries for every declared name that is not interpreted.
    pub fn cover(&mut self, kb: &KnowledgeBase) {
        for &n in kb.concepts() {
            self.concepts.entry(n).or_default();
        }
        for &n in kb.roles() {
            self.roles.entry(n).or_default();
        }
        for &n in kb.individuals() {
            self.individuals.entry(n).or_insert(0);
        }
        for &n in kb.features() {
            self.features.entry(n).or_default();
        }
    }

    fn check(&self) -> Result<(), OracleError> {
        if self.size == 0 {
            return Err(OracleError::EmptyDomain);
        }
        if self.individuals.values().any(|&e| e >= self.size) {
            return Err(OracleError::OutOfDomain);
        }
        Ok(())
    }

    fn role(&self, r: Name) -> Result<&BTreeSet<(usize, usize)>, OracleError> {
        self.roles.get(&r).ok_or(OracleError::Uninterpreted(r))
    }

    /// Pairs in the composition `r1 ∘ … ∘ rk`.
    fn compose(&self, chain: &[Name]) -> Result<BTreeSet<(usize, usize)>, OracleError> {
        let mut cur: BTreeSet<(usize, usize)> = (0..self.size).map(|e| (e, e)).collect();
        for &r in chain {
            let edges = self.role(r)?;
            cur = cur
                .iter()
                .flat_map(|&(a, b)| {
                    edges
                        .range((b, 0)..=(b, usize::MAX))
                        .map(move |&(_, c)| (a, c))
                })
                .collect();
        }
        Ok(cur)
    }
}

/// The extension of a description.
pub fn interpret(c: &Concept, i: &FiniteInterpretation) -> Result<BTreeSet<usize>, OracleError> {
    i.check()?;
    let all = || (0..i.size).collect::<BTreeSet<usize>>();
    Ok(match c {
        Concept::Top => all(),
        Concept::Bottom => BTreeSet::new(),
        Concept::Atomic(n) => i
            .concepts
            .get(n)
            .ok_or(OracleError::Uninterpreted(*n))?
            .iter()
            .copied()
            .filter(|&e| e < i.size)
            .collect(),
        Concept::Nominal(a) => {
            let e = *i.individuals.get(a).ok_or(OracleError::Uninterpreted(*a))?;
            [e].into_iter().collect()
        }
        Concept::Conj(l, r) => {
            let l = interpret(l, i)?;
            let r = interpret(r, i)?;
            l.intersection(&r).copied().collect()
        }
        Concept::Exists(r, f) => {
            let filler = interpret(f, i)?;
            i.role(*r)?
                .iter()
                .filter(|(_, y)| filler.contains(y))
                .map(|&(x, _)| x)
                .collect()
        }
        Concept::Pred(atom) => {
            let mut maps = Vec::new();
            for f in &atom.features {
                maps.push(i.features.get(f).ok_or(OracleError::Uninterpreted(*f))?);
            }
            (0..i.size)
                .filter(|e| {
                    let values: Option<Vec<Value>> =
                        maps.iter().map(|m| m.get(e).cloned()).collect();
                    values.is_some_and(|vs| {
                        crate::cdomains::apply_predicate(&atom.predicate, &vs).unwrap_or(false)
                    })
                })
                .collect()
        }
    })
}

/// Whether `i` satisfies every constraint of `kb`.
pub fn is_model(i: &FiniteInterpretation, kb: &KnowledgeBase) -> Result<bool, OracleError> {
    i.check()?;
    for c in &kb.constraints {
        let ok = match c {
            Constraint::Gci { lhs, rhs } => interpret(lhs, i)?.is_subset(&interpret(rhs, i)?),
            Constraint::RoleInclusion { chain, sup } => i.compose(chain)?.is_subset(i.role(*sup)?),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Human-readable listing of an interpretation.
pub fn describe(i: &FiniteInterpretation, kb: &KnowledgeBase) -> String {
    let mut out = format!("domain {{0..{}}}\n", i.size.saturating_sub(1));
    let label = |n: Name| kb.label(n).to_string();
    for (n, e) in &i.individuals {
        out.push_str(&format!("  {} -> {e}\n", label(*n)));
    }
    for (n, s) in &i.concepts {
        out.push_str(&format!("  {} = {s:?}\n", label(*n)));
    }
    for (n, s) in &i.roles {
        out.push_str(&format!("  {} = {s:?}\n", label(*n)));
    }
    for (n, m) in &i.features {
        if !m.is_empty() {
            let vals: Vec<String> = m.iter().map(|(e, v)| format!("{e}: {v}")).collect();
            out.push_str(&format!("  {} = {{{}}}\n", label(*n), vals.join(", ")));
        }
    }
    out
}
