use std::collections::BTreeMap;

use super::state::{ClassificationState, Id};
use crate::kb::{Concept, Constraint, KnowledgeBase, Name};

/// Normal-form constraints indexed by the premise that can trigger them.
/// Every entry carries the constraint's position in the kb.
#[derive(Default)]
pub(crate) struct RuleIndex {
    /// `B ⊑ D`: B ↦ (D, axiom)
    pub told: BTreeMap<Id, Vec<(Id, usize)>>,
    /// `B1 ⊓ B2 ⊑ D`: B1 ↦ (B2, D, axiom), stored under both conjuncts
    pub conj: BTreeMap<Id, Vec<(Id, Id, usize)>>,
    /// `B ⊑ ∃r.D`: B ↦ (r, D, axiom)
    pub exists_rhs: BTreeMap<Id, Vec<(Name, Id, usize)>>,
    /// `∃r.B ⊑ E`: (r, B) ↦ (E, axiom)
    pub exists_lhs: BTreeMap<(Name, Id), Vec<(Id, usize)>>,
    /// `∃r.B ⊑ E`: B ↦ (r, E, axiom)
    pub exists_filler: BTreeMap<Id, Vec<(Name, Id, usize)>>,
    /// `r ⊑ s`: r ↦ (s, axiom)
    pub sub: BTreeMap<Name, Vec<(Name, usize)>>,
    /// `r1∘r2 ⊑ s`: r1 ↦ (r2, s, axiom)
    pub chain_left: BTreeMap<Name, Vec<(Name, Name, usize)>>,
    /// `r1∘r2 ⊑ s`: r2 ↦ (r1, s, axiom)
    pub chain_right: BTreeMap<Name, Vec<(Name, Name, usize)>>,
    /// Predicate atoms of BC
    pub atoms: Vec<Id>,
}

impl RuleIndex {
    pub fn build(kb: &KnowledgeBase, state: &ClassificationState) -> RuleIndex {
        let mut ix = RuleIndex::default();
        let id = |c: &Concept| state.id(c).expect("normal-form operand is in BC or is ⊥");
        for (i, c) in kb.constraints.iter().enumerate() {
            match c {
                Constraint::RoleInclusion { chain, sup } => match chain.as_slice() {
                    [r] => ix.sub.entry(*r).or_default().push((*sup, i)),
                    [r1, r2] => {
                        ix.chain_left.entry(*r1).or_default().push((*r2, *sup, i));
                        ix.chain_right.entry(*r2).or_default().push((*r1, *sup, i));
                    }
                    _ => unreachable!("normal form has chains of length 1 or 2"),
                },
                Constraint::Gci { lhs, rhs } => match (lhs, rhs) {
                    (Concept::Conj(a, b), d) => {
                        let (a, b, d) = (id(a), id(b), id(d));
                        ix.conj.entry(a).or_default().push((b, d, i));
                        if a != b {
                            ix.conj.entry(b).or_default().push((a, d, i));
                        }
                    }
                    (Concept::Exists(r, b), e) => {
                        let (b, e) = (id(b), id(e));
                        ix.exists_lhs.entry((*r, b)).or_default().push((e, i));
                        ix.exists_filler.entry(b).or_default().push((*r, e, i));
                    }
                    (b, Concept::Exists(r, d)) => {
                        ix.exists_rhs.entry(id(b)).or_default().push((*r, id(d), i));
                    }
                    (b, d) => ix.told.entry(id(b)).or_default().push((id(d), i)),
                },
            }
        }
        ix.atoms = (0..state.bc.len() as Id)
            .filter(|&i| matches!(state.concept(i), Concept::Pred(_)))
            .collect();
        ix
    }
}
