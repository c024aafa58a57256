use std::collections::BTreeMap;

use super::state::{ClassificationState, Id, Key};
use super::Entry;
use crate::cdomains::{self, DomainId, PredicateAtom, Satisfiability};
use crate::kb::{Concept, Constraint, KnowledgeBase};

/// Full re-scan of every rule against a state. Returns an entry that some
/// rule would add, or `None` when the state is closed under all rules.
///
/// Written directly from the rule statements without the saturation
/// indexes, so it serves as an independent check of the worklist engine.
pub fn find_missing(kb: &KnowledgeBase, st: &ClassificationState) -> Option<Entry> {
    missing_key(kb, st).map(|k| st.entry_of(k))
}

fn missing_key(kb: &KnowledgeBase, st: &ClassificationState) -> Option<Key> {
    let n = st.bc.len() as Id;
    let bot = st.bottom();
    let id = |c: &Concept| st.id(c);
    let all_edges: Vec<Key> = st
        .keys()
        .into_iter()
        .filter(|k| matches!(k, Key::R(..)))
        .collect();
    let edges_of = |role| {
        all_edges
            .iter()
            .filter_map(move |k| match *k {
                Key::R(r, c, d) if r == role => Some((c, d)),
                _ => None,
            })
            .collect::<Vec<_>>()
    };

    for con in &kb.constraints {
        match con {
            Constraint::Gci { lhs, rhs } => match (lhs, rhs) {
                (Concept::Conj(a, b), d) => {
                    let (a, b, d) = (id(a)?, id(b)?, id(d)?);
                    for c in 0..n {
                        if st.s_has(c, a) && st.s_has(c, b) && !st.s_has(c, d) {
                            return Some(Key::S(c, d));
                        }
                    }
                }
                (Concept::Exists(r, y), e) => {
                    let (y, e) = (id(y)?, id(e)?);
                    for (c, d) in edges_of(*r) {
                        if st.s_has(d, y) && !st.s_has(c, e) {
                            return Some(Key::S(c, e));
                        }
                    }
                }
                (b, Concept::Exists(r, y)) => {
                    let (b, y) = (id(b)?, id(y)?);
                    for c in 0..n {
                        if st.s_has(c, b) && !st.has(Key::R(*r, c, y)) {
                            return Some(Key::R(*r, c, y));
                        }
                    }
                }
                (b, d) => {
                    let (b, d) = (id(b)?, id(d)?);
                    for c in 0..n {
                        if st.s_has(c, b) && !st.s_has(c, d) {
                            return Some(Key::S(c, d));
                        }
                    }
                }
            },
            Constraint::RoleInclusion { chain, sup } => match chain.as_slice() {
                [r] => {
                    for (c, d) in edges_of(*r) {
                        if !st.has(Key::R(*sup, c, d)) {
                            return Some(Key::R(*sup, c, d));
                        }
                    }
                }
                [r1, r2] => {
                    for (c, d) in edges_of(*r1) {
                        for (d2, e) in edges_of(*r2) {
                            if d == d2 && !st.has(Key::R(*sup, c, e)) {
                                return Some(Key::R(*sup, c, e));
                            }
                        }
                    }
                }
                _ => {}
            },
        }
    }

    // CR5
    for k in &all_edges {
        let Key::R(_, c, d) = *k else { continue };
        if st.s_has(d, bot) && !st.s_has(c, bot) {
            return Some(Key::S(c, bot));
        }
    }

    // CR6
    for a in (0..n).filter(|&a| st.is_nominal(a)) {
        for c in 0..n {
            for d in 0..n {
                if c == d || !st.s_has(c, a) || !st.s_has(d, a) {
                    continue;
                }
                let gap = st.s[d as usize].keys().find(|&&x| !st.s_has(c, x));
                if let Some(&x) = gap {
                    if st.path(c, d).is_some() {
                        return Some(Key::S(c, x));
                    }
                }
            }
        }
    }

    // CR7, CR8, CR9
    let atoms: Vec<(Id, PredicateAtom)> = (0..n)
        .filter_map(|i| match st.concept(i) {
            Concept::Pred(p) => Some((i, p.clone())),
            _ => None,
        })
        .collect();
    for c in 0..n {
        let mut by_domain: BTreeMap<DomainId, Vec<PredicateAtom>> = BTreeMap::new();
        for (i, p) in &atoms {
            if st.s_has(c, *i) {
                by_domain.entry(p.domain()).or_default().push(p.clone());
            }
        }
        let held: Vec<&PredicateAtom> = by_domain.values().flatten().collect();
        for p in &held {
            for q in &held {
                let clash =
                    p.domain() != q.domain() && p.features.iter().any(|f| q.features.contains(f));
                if clash && !st.s_has(c, bot) {
                    return Some(Key::S(c, bot));
                }
            }
        }
        for (dm, conj) in &by_domain {
            let dec = cdomains::domain(*dm);
            if dec.satisfiable(conj).ok()? == Satisfiability::Unsat && !st.s_has(c, bot) {
                return Some(Key::S(c, bot));
            }
            for (g, goal) in &atoms {
                if goal.domain() == *dm && !st.s_has(c, *g) && dec.implies(conj, goal).ok()? {
                    return Some(Key::S(c, *g));
                }
            }
        }
    }
    None
}
