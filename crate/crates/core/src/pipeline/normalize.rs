//! Two-phase normalization.
//!
//! Phase 1 (NF1–NF5) simplifies role chains and left-hand sides; phase 2
//! (NF6, NF7) starts once phase 1 is at a fixpoint and simplifies
//! right-hand sides. Rules are selected by scanning constraints in order;
//! the first constraint with an applicable rule is rewritten in place by the
//! highest-priority rule that applies to it.

use crate::kb::{Concept, Constraint, KbError, KnowledgeBase, Name, NameKind};

use super::measure::{constraint_measure, is_normal_rhs, nf_measure};
use super::PipelineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NfRule {
    /// r1∘…∘rk ⊑ s with k ≥ 3
    Nf1,
    /// C ⊓ D ⊑ E with a complex conjunct (both at once when both are complex)
    Nf2,
    /// ∃r.Ĉ ⊑ D
    Nf3,
    /// ⊥ ⊑ D
    Nf4,
    /// Ĉ ⊑ D̂
    Nf5,
    /// B ⊑ ∃r.Ĉ
    Nf6,
    /// B ⊑ C ⊓ D
    Nf7,
    /// C ⊑ ⊤, dropped as vacuous
    DropTop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationStep {
    pub rule: NfRule,
    pub measure_before: u64,
    pub measure_after: u64,
}

const PHASE_1: [NfRule; 5] = [
    NfRule::Nf1,
    NfRule::Nf2,
    NfRule::Nf3,
    NfRule::Nf4,
    NfRule::Nf5,
];
const PHASE_2: [NfRule; 3] = [NfRule::Nf6, NfRule::Nf7, NfRule::DropTop];

fn applies(rule: NfRule, c: &Constraint) -> bool {
    match (rule, c) {
        (NfRule::Nf1, Constraint::RoleInclusion { chain, .. }) => chain.len() >= 3,
        (_, Constraint::RoleInclusion { .. }) => false,
        (NfRule::Nf1, _) => false,
        (NfRule::Nf2, Constraint::Gci { lhs, .. }) => {
            matches!(lhs, Concept::Conj(l, r) if !l.is_basic() || !r.is_basic())
        }
        (NfRule::Nf3, Constraint::Gci { lhs, .. }) => {
            matches!(lhs, Concept::Exists(_, f) if !f.is_basic())
        }
        (NfRule::Nf4, Constraint::Gci { lhs, .. }) => *lhs == Concept::Bottom,
        (NfRule::Nf5, Constraint::Gci { lhs, rhs }) => !lhs.is_basic() && !is_normal_rhs(rhs),
        (NfRule::Nf6, Constraint::Gci { lhs, rhs }) => {
            lhs.is_basic() && matches!(rhs, Concept::Exists(_, f) if !f.is_basic())
        }
        (NfRule::Nf7, Constraint::Gci { lhs, rhs }) => {
            lhs.is_basic() && matches!(rhs, Concept::Conj(..))
        }
        (NfRule::DropTop, Constraint::Gci { rhs, .. }) => *rhs == Concept::Top,
    }
}

fn fresh_concept(kb: &mut KnowledgeBase) -> Concept {
    Concept::Atomic(kb.declare_fresh(NameKind::Concept, "_N"))
}

/// Rewrites one constraint; the result replaces it in place.
fn apply(rule: NfRule, c: Constraint, kb: &mut KnowledgeBase) -> Vec<Constraint> {
    use Constraint::{Gci, RoleInclusion};
    match (rule, c) {
        (NfRule::Nf1, RoleInclusion { mut chain, sup }) => {
            let last = chain.pop().expect("chain of length ≥ 3");
            let u: Name = kb.declare_fresh(NameKind::Role, "_u");
            vec![
                Constraint::role_inclusion(chain, u),
                Constraint::role_inclusion(vec![u, last], sup),
            ]
        }
        (
            NfRule::Nf2,
            Gci {
                lhs: Concept::Conj(l, r),
                rhs,
            },
        ) => {
            let (l, r) = (*l, *r);
            match (l.is_basic(), r.is_basic()) {
                (false, false) => {
                    let a = fresh_concept(kb);
                    let b = fresh_concept(kb);
                    vec![
                        Constraint::gci(Concept::conj(a.clone(), b.clone()), rhs),
                        Constraint::gci(r, b),
                        Constraint::gci(l, a),
                    ]
                }
                (true, false) => {
                    let a = fresh_concept(kb);
                    vec![
                        Constraint::gci(Concept::conj(l, a.clone()), rhs),
                        Constraint::gci(r, a),
                    ]
                }
                _ => {
                    let a = fresh_concept(kb);
                    vec![
                        Constraint::gci(Concept::conj(a.clone(), r), rhs),
                        Constraint::gci(l, a),
                    ]
                }
            }
        }
        (
            NfRule::Nf3,
            Gci {
                lhs: Concept::Exists(role, filler),
                rhs,
            },
        ) => {
            let a = fresh_concept(kb);
            vec![
                Constraint::gci(*filler, a.clone()),
                Constraint::gci(Concept::exists(role, a), rhs),
            ]
        }
        (NfRule::Nf4, _) | (NfRule::DropTop, _) => Vec::new(),
        (NfRule::Nf5, Gci { lhs, rhs }) => {
            let a = fresh_concept(kb);
            vec![Constraint::gci(lhs, a.clone()), Constraint::gci(a, rhs)]
        }
        (
            NfRule::Nf6,
            Gci {
                lhs,
                rhs: Concept::Exists(role, filler),
            },
        ) => {
            let a = fresh_concept(kb);
            vec![
                Constraint::gci(lhs, Concept::exists(role, a.clone())),
                Constraint::gci(a, *filler),
            ]
        }
        (
            NfRule::Nf7,
            Gci {
                lhs,
                rhs: Concept::Conj(l, r),
            },
        ) => {
            vec![Constraint::gci(lhs.clone(), *l), Constraint::gci(lhs, *r)]
        }
        (rule, c) => unreachable!("{rule:?} applied to ineligible {c:?}"),
    }
}

fn run_phase(
    kb: &mut KnowledgeBase,
    rules: &[NfRule],
    steps: &mut Vec<NormalizationStep>,
) -> Result<(), PipelineError> {
    let mut total = nf_measure(kb);
    loop {
        let found = kb
            .constraints
            .iter()
            .enumerate()
            .find_map(|(i, c)| rules.iter().find(|&&r| applies(r, c)).map(|&r| (i, r)));
        let Some((i, rule)) = found else {
            return Ok(());
        };
        let c = kb.constraints.remove(i);
        let removed = constraint_measure(&c);
        let replacement = apply(rule, c, kb);
        let added: u64 = replacement.iter().map(constraint_measure).sum();
        kb.constraints.splice(i..i, replacement);
        let after = total - removed + added;
        if after >= total {
            return Err(PipelineError::MeasureNotDecreasing {
                rule,
                before: total,
                after,
            });
        }
        steps.push(NormalizationStep {
            rule,
            measure_before: total,
            measure_after: after,
        });
        total = after;
    }
}

/// Normalizes and returns the rule applications with the measure before and
/// after each one.
pub fn normalize_traced(
    kb: &KnowledgeBase,
) -> Result<(KnowledgeBase, Vec<NormalizationStep>), PipelineError> {
    kb.ensure_valid()?;
    let mut out = kb.clone();
    let mut steps = Vec::new();
    run_phase(&mut out, &PHASE_1, &mut steps)?;
    run_phase(&mut out, &PHASE_2, &mut steps)?;
    debug_assert!(is_normal(&out));
    debug_assert_eq!(out.validate(), Ok(()));
    Ok((out, steps))
}

pub fn normalize(kb: &KnowledgeBase) -> Result<KnowledgeBase, PipelineError> {
    normalize_traced(kb).map(|(kb, _)| kb)
}

/// The first constraint violating the normal-form shapes, if any.
pub fn check_normal_form(kb: &KnowledgeBase) -> Result<(), KbError> {
    for (i, c) in kb.constraints.iter().enumerate() {
        let ok = match c {
            Constraint::RoleInclusion { chain, .. } => (1..=2).contains(&chain.len()),
            Constraint::Gci { lhs, rhs } => {
                let lhs_ok = match lhs {
                    Concept::Conj(l, r) => l.is_basic() && r.is_basic(),
                    Concept::Exists(_, f) => f.is_basic(),
                    other => other.is_basic(),
                };
                let rhs_ok = match (lhs.is_basic(), rhs) {
                    (true, Concept::Exists(_, f)) => f.is_basic(),
                    (_, rhs) => is_normal_rhs(rhs),
                };
                lhs_ok && rhs_ok
            }
        };
        if !ok {
            return Err(KbError::NotNormal(format!(
                "constraint #{i}: {}",
                crate::text::print_constraint(kb, c)
            )));
        }
    }
    Ok(())
}

pub fn is_normal(kb: &KnowledgeBase) -> bool {
    check_normal_form(kb).is_ok()
}
