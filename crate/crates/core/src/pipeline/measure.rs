//! Weighted count of remaining normalization work. Every rule application
//! strictly decreases the total; each GCI also contributes one unit so that
//! deleting a constraint always counts as progress.

use crate::kb::{Concept, Constraint, KnowledgeBase};

const NF2_WEIGHT: u64 = 2;
const NF3_WEIGHT: u64 = 3;
const NF5_WEIGHT: u64 = 2;
const NF6_WEIGHT: u64 = 2;
const NF7_WEIGHT: u64 = 2;

/// Nested existential restrictions with a complex filler on a left-hand side.
pub fn nf3_component(c: &Concept) -> u64 {
    match c {
        Concept::Conj(l, r) => nf3_component(l) + nf3_component(r),
        Concept::Exists(_, x) if x.is_basic() => 0,
        Concept::Exists(_, x) => nf3_component(x) + NF3_WEIGHT,
        _ => 0,
    }
}

fn lhs_weight(c: &Concept) -> u64 {
    match c {
        Concept::Conj(l, r) => {
            let complex = [l, r].iter().filter(|x| !x.is_basic()).count() as u64;
            lhs_weight(l) + lhs_weight(r) + NF2_WEIGHT * complex
        }
        Concept::Exists(_, x) if x.is_basic() => 0,
        Concept::Exists(_, x) => lhs_weight(x) + NF3_WEIGHT,
        Concept::Bottom => 1,
        _ => 0,
    }
}

fn rhs_weight(c: &Concept) -> u64 {
    match c {
        Concept::Conj(l, r) => rhs_weight(l) + rhs_weight(r) + NF7_WEIGHT,
        Concept::Exists(_, x) if x.is_basic() => 0,
        Concept::Exists(_, x) => rhs_weight(x) + NF6_WEIGHT,
        _ => 0,
    }
}

pub(crate) fn is_normal_rhs(c: &Concept) -> bool {
    c.is_basic() || *c == Concept::Bottom
}

pub fn constraint_measure(c: &Constraint) -> u64 {
    match c {
        Constraint::RoleInclusion { chain, .. } => 1 + 2 * (chain.len().saturating_sub(2) as u64),
        Constraint::Gci { lhs, rhs } => {
            let both_complex = !lhs.is_basic() && !is_normal_rhs(rhs);
            1 + lhs_weight(lhs) + rhs_weight(rhs) + if both_complex { NF5_WEIGHT } else { 0 }
        }
    }
}

pub fn nf_measure(kb: &KnowledgeBase) -> u64 {
    kb.constraints.iter().map(constraint_measure).sum()
}
