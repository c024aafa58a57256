//! Replaying derivations and building explanation trees.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::state::{ClassificationState, Id, Key, Raw, RawPremise};
use super::{ClassifyError, Derivation, Entry, Rule};
use crate::cdomains::{self, PredicateAtom, Satisfiability};
use crate::kb::{Concept, Constraint, KnowledgeBase, Name};
use crate::text::{print_concept_with, print_constraint_with};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("entry is not in the classification")]
    Absent,
    #[error("premise is missing or was derived later: {0}")]
    BadPremise(String),
    #[error("constraint #{0} does not exist or has the wrong shape")]
    BadAxiom(usize),
    #[error("{rule} does not produce this entry from its premises")]
    Mismatch { rule: String },
}

/// Re-applies the recorded rule to the recorded premises and checks that it
/// yields `entry`. Premises must exist and be strictly older than the entry,
/// which makes every explanation tree finite.
pub fn replay(
    kb: &KnowledgeBase,
    st: &ClassificationState,
    entry: &Entry,
) -> Result<(), ReplayError> {
    let key = st.key_of(entry).ok_or(ReplayError::Absent)?;
    replay_key(kb, st, key)
}

/// Replays every entry; returns the failures.
pub fn replay_all(kb: &KnowledgeBase, st: &ClassificationState) -> Vec<(Entry, ReplayError)> {
    st.keys()
        .into_iter()
        .filter_map(|k| replay_key(kb, st, k).err().map(|e| (st.entry_of(k), e)))
        .collect()
}

fn replay_key(kb: &KnowledgeBase, st: &ClassificationState, key: Key) -> Result<(), ReplayError> {
    let info = st.info(key).ok_or(ReplayError::Absent)?;
    for k in info.raw.keys() {
        match st.info(k) {
            Some(p) if p.seq < info.seq => {}
            _ => return Err(ReplayError::BadPremise(format!("{:?}", st.entry_of(k)))),
        }
    }
    let mismatch = |rule: &str| ReplayError::Mismatch {
        rule: rule.to_string(),
    };
    let bot = st.bottom();
    let gci = |i: usize| match kb.constraints.get(i) {
        Some(Constraint::Gci { lhs, rhs }) => Ok((lhs, rhs)),
        _ => Err(ReplayError::BadAxiom(i)),
    };
    let chain = |i: usize| match kb.constraints.get(i) {
        Some(Constraint::RoleInclusion { chain, sup }) => Ok((chain.as_slice(), *sup)),
        _ => Err(ReplayError::BadAxiom(i)),
    };
    let c = |id: Id| st.concept(id);

    let ok = match (&info.raw, key) {
        (Raw::Init, Key::S(a, b)) => b == a || b == 0,
        (Raw::Init, Key::R(..)) => false,
        (
            Raw::ExistsR {
                member: Key::S(m, x),
                axiom,
            },
            Key::R(r, a, y),
        ) => {
            let (lhs, rhs) = gci(*axiom)?;
            *m == a && lhs == c(*x) && *rhs == Concept::exists(r, c(y).clone())
        }
        (
            Raw::TransR {
                edge: Key::R(r, a, b),
                axiom,
            },
            Key::R(s, a2, b2),
        ) => {
            let (ch, sup) = chain(*axiom)?;
            ch == [*r] && sup == s && (*a, *b) == (a2, b2)
        }
        (
            Raw::SplitR {
                left: Key::R(r1, a, b),
                right: Key::R(r2, b2, e),
                axiom,
            },
            Key::R(s, a3, e3),
        ) => {
            let (ch, sup) = chain(*axiom)?;
            ch == [*r1, *r2] && sup == s && b == b2 && *a == a3 && *e == e3
        }
        (Raw::ByRule { rule, premises }, Key::S(a, target)) => {
            let keys: Vec<Key> = premises
                .iter()
                .filter_map(|p| match p {
                    RawPremise::Key(k) => Some(*k),
                    _ => None,
                })
                .collect();
            let axioms: Vec<usize> = premises
                .iter()
                .filter_map(|p| match p {
                    RawPremise::Axiom(i) => Some(*i),
                    _ => None,
                })
                .collect();
            match (rule, keys.as_slice(), axioms.as_slice()) {
                (Rule::Cr1, [Key::S(a1, x)], [ax]) => {
                    let (lhs, rhs) = gci(*ax)?;
                    *a1 == a && lhs == c(*x) && rhs == c(target)
                }
                (Rule::Cr2, [Key::S(a1, x), Key::S(a2, y)], [ax]) => {
                    let (lhs, rhs) = gci(*ax)?;
                    let (x, y) = (c(*x).clone(), c(*y).clone());
                    *a1 == a
                        && *a2 == a
                        && (*lhs == Concept::conj(x.clone(), y.clone())
                            || *lhs == Concept::conj(y, x))
                        && rhs == c(target)
                }
                (Rule::Cr4, [Key::R(r, a1, d), Key::S(d2, y)], [ax]) => {
                    let (lhs, rhs) = gci(*ax)?;
                    *a1 == a
                        && d == d2
                        && *lhs == Concept::exists(*r, c(*y).clone())
                        && rhs == c(target)
                }
                (Rule::Cr5, [Key::R(_, a1, d), Key::S(d2, b)], []) => {
                    *a1 == a && d == d2 && *b == bot && target == bot
                }
                (Rule::Cr6, [Key::S(a1, n), Key::S(d, n2), rest @ ..], []) => {
                    let Some((Key::S(d3, x), path)) = rest.split_last() else {
                        return Err(mismatch("CR6"));
                    };
                    *a1 == a
                        && n == n2
                        && st.is_nominal(*n)
                        && d == d3
                        && *x == target
                        && valid_path(st, a, *d, path)
                }
                (Rule::Cr7, keys, []) => {
                    let Some(atoms) = atoms_of(st, a, keys) else {
                        return Err(mismatch("CR7"));
                    };
                    target == bot
                        && same_domain(&atoms)
                        && cdomains::domain(atoms[0].domain()).satisfiable(&atoms)
                            == Ok(Satisfiability::Unsat)
                }
                (Rule::Cr8, keys, []) => {
                    let (Some(atoms), Concept::Pred(goal)) = (atoms_of(st, a, keys), c(target))
                    else {
                        return Err(mismatch("CR8"));
                    };
                    same_domain(&atoms)
                        && atoms[0].domain() == goal.domain()
                        && cdomains::domain(goal.domain()).implies(&atoms, goal) == Ok(true)
                }
                (Rule::Cr9, keys @ [_, _], []) => {
                    let Some(atoms) = atoms_of(st, a, keys) else {
                        return Err(mismatch("CR9"));
                    };
                    target == bot
                        && atoms[0].domain() != atoms[1].domain()
                        && atoms[0]
                            .features
                            .iter()
                            .any(|f| atoms[1].features.contains(f))
                }
                _ => false,
            }
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        let rule = st
            .derivation(&st.entry_of(key))
            .and_then(|d| d.rule())
            .map(|r| r.to_string())
            .unwrap_or_else(|| "init".into());
        Err(mismatch(&rule))
    }
}

/// Premises of a concrete-domain rule: atoms in S of the same concept.
fn atoms_of(st: &ClassificationState, a: Id, keys: &[Key]) -> Option<Vec<PredicateAtom>> {
    if keys.is_empty() {
        return None;
    }
    keys.iter()
        .map(|k| match *k {
            Key::S(a1, x) if a1 == a => match st.concept(x) {
                Concept::Pred(p) => Some(p.clone()),
                _ => None,
            },
            _ => None,
        })
        .collect()
}

fn same_domain(atoms: &[PredicateAtom]) -> bool {
    atoms.windows(2).all(|w| w[0].domain() == w[1].domain())
}

/// A chain of edges from a permitted root to `target`.
fn valid_path(st: &ClassificationState, source: Id, target: Id, path: &[Key]) -> bool {
    let mut cur = match path.first() {
        Some(Key::R(_, start, _)) => *start,
        Some(_) => return false,
        None => target,
    };
    if cur != source && !(st.config.nominal_roots && st.is_nominal(cur)) {
        return false;
    }
    for k in path {
        match *k {
            Key::R(_, from, to) if from == cur && st.has(*k) => cur = to,
            _ => return false,
        }
    }
    cur == target
}

/// One node of an explanation: the entry, how it was derived, and the
/// explanations of its derived premises. An entry already explained
/// elsewhere in the tree appears again with `repeated` set and no children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplanationNode {
    pub entry: Entry,
    pub derivation: Derivation,
    pub children: Vec<ExplanationNode>,
    pub repeated: bool,
}

/// Explanation tree rooted at `entry`.
pub fn explain(st: &ClassificationState, entry: &Entry) -> Result<ExplanationNode, ClassifyError> {
    let key = st
        .key_of(entry)
        .filter(|&k| st.has(k))
        .ok_or_else(|| ClassifyError::Absent(format!("{entry:?}")))?;
    let mut seen = BTreeSet::new();
    Ok(build(st, key, &mut seen))
}

fn build(st: &ClassificationState, key: Key, seen: &mut BTreeSet<Key>) -> ExplanationNode {
    let entry = st.entry_of(key);
    let info = st.info(key).expect("explained entries exist");
    let derivation = st.derivation(&entry).expect("explained entries exist");
    if !seen.insert(key) {
        return ExplanationNode {
            entry,
            derivation,
            children: Vec::new(),
            repeated: true,
        };
    }
    let children = info
        .raw
        .keys()
        .into_iter()
        .map(|k| build(st, k, seen))
        .collect();
    ExplanationNode {
        entry,
        derivation,
        children,
        repeated: false,
    }
}

/// A rendered explanation with labels resolved, for display and JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceTree {
    pub fact: String,
    pub rule: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub axioms: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<TraceTree>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub repeated: bool,
}

impl ExplanationNode {
    pub fn tree(&self, kb: &KnowledgeBase) -> TraceTree {
        self.tree_with(kb, &|n| kb.label(n).to_string())
    }

    /// Renders with a custom name labeling.
    pub fn tree_with(&self, kb: &KnowledgeBase, label: &dyn Fn(Name) -> String) -> TraceTree {
        let show = |c: &Concept| print_concept_with(c, label);
        let fact = match &self.entry {
            Entry::S { subsumee, subsumer } => {
                format!("{} in S({})", show(subsumer), show(subsumee))
            }
            Entry::R { role, from, to } => {
                format!("({}, {}) in R({})", show(from), show(to), label(*role))
            }
        };
        let rule = match &self.derivation {
            Derivation::Init => "init".to_string(),
            Derivation::ByRule { rule, .. } => rule.to_string(),
            Derivation::ExistsR { .. } => "ExistsR (CR3)".to_string(),
            Derivation::TransR { .. } => "TransR (CR10)".to_string(),
            Derivation::SplitR { .. } => "SplitR (CR11)".to_string(),
        };
        let axioms = if self.repeated {
            Vec::new()
        } else {
            self.derivation
                .premises()
                .into_iter()
                .filter_map(|p| match p {
                    super::Premise::Axiom(i) => kb
                        .constraints
                        .get(i)
                        .map(|c| print_constraint_with(c, label)),
                    super::Premise::Entry(_) => None,
                })
                .collect()
        };
        TraceTree {
            fact,
            rule,
            axioms,
            premises: self
                .children
                .iter()
                .map(|c| c.tree_with(kb, label))
                .collect(),
            repeated: self.repeated,
        }
    }
}

impl TraceTree {
    /// Indented text rendering, one fact per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        if self.repeated {
            out.push_str(&format!(
                "{pad}{} [{}, shown above]\n",
                self.fact, self.rule
            ));
            return;
        }
        out.push_str(&format!("{pad}{} [{}]\n", self.fact, self.rule));
        for a in &self.axioms {
            out.push_str(&format!("{pad}  axiom {a}\n"));
        }
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }
}
