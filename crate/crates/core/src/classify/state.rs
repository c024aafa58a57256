use std::collections::{BTreeMap, BTreeSet, VecDeque};

use indexmap::IndexMap;

use super::{ClassifierConfig, ClassifyError, Derivation, Entry, Premise, Rule};
use crate::kb::{BasicConceptSet, Concept, KnowledgeBase, Name};
use crate::pipeline::check_normal_form;

/// Index of a basic concept; `bc.len()` stands for ⊥.
pub(crate) type Id = u32;

static BOTTOM: Concept = Concept::Bottom;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Key {
    S(Id, Id),
    R(Name, Id, Id),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum RawPremise {
    Key(Key),
    Axiom(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Raw {
    Init,
    ByRule {
        rule: Rule,
        premises: Vec<RawPremise>,
    },
    ExistsR {
        member: Key,
        axiom: usize,
    },
    TransR {
        edge: Key,
        axiom: usize,
    },
    SplitR {
        left: Key,
        right: Key,
        axiom: usize,
    },
}

impl Raw {
    pub(crate) fn keys(&self) -> Vec<Key> {
        match self {
            Raw::Init => Vec::new(),
            Raw::ByRule { premises, .. } => premises
                .iter()
                .filter_map(|p| match p {
                    RawPremise::Key(k) => Some(*k),
                    RawPremise::Axiom(_) => None,
                })
                .collect(),
            Raw::ExistsR { member, .. } => vec![*member],
            Raw::TransR { edge, .. } => vec![*edge],
            Raw::SplitR { left, right, .. } => vec![*left, *right],
        }
    }
}

/// When an entry was added and by which rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Info {
    pub(crate) seq: u64,
    pub(crate) raw: Raw,
}

/// The S and R maps with a derivation per entry.
#[derive(Clone, Debug)]
pub struct ClassificationState {
    pub(crate) bc: BasicConceptSet,
    pub(crate) config: ClassifierConfig,
    pub(crate) s: Vec<IndexMap<Id, Info>>,
    pub(crate) r: BTreeMap<Name, IndexMap<(Id, Id), Info>>,
    pub(crate) succ: Vec<BTreeSet<(Name, Id)>>,
    pub(crate) pred: Vec<BTreeSet<(Name, Id)>>,
    pub(crate) seq: u64,
    pub(crate) queue: VecDeque<Key>,
}

/// `S(C) = {C, ⊤}` for every basic concept and empty role maps.
pub fn init_state(
    kb: &KnowledgeBase,
    config: ClassifierConfig,
) -> Result<ClassificationState, ClassifyError> {
    check_normal_form(kb)?;
    let bc = kb.basic_concepts();
    let n = bc.len();
    let mut state = ClassificationState {
        bc,
        config,
        s: vec![IndexMap::new(); n],
        r: kb.roles().iter().map(|&r| (r, IndexMap::new())).collect(),
        succ: vec![BTreeSet::new(); n],
        pred: vec![BTreeSet::new(); n],
        seq: 0,
        queue: VecDeque::new(),
    };
    for c in 0..n as Id {
        state.insert(Key::S(c, c), Raw::Init);
        state.insert(Key::S(c, 0), Raw::Init);
    }
    Ok(state)
}

impl ClassificationState {
    pub(crate) fn bottom(&self) -> Id {
        self.bc.len() as Id
    }

    /// Adds the entry if new and enqueues it for rule processing.
    pub(crate) fn insert(&mut self, key: Key, raw: Raw) -> bool {
        if self.has(key) {
            return false;
        }
        let info = Info { seq: self.seq, raw };
        self.seq += 1;
        match key {
            Key::S(c, d) => {
                self.s[c as usize].insert(d, info);
            }
            Key::R(role, c, d) => {
                self.r.entry(role).or_default().insert((c, d), info);
                self.succ[c as usize].insert((role, d));
                self.pred[d as usize].insert((role, c));
            }
        }
        self.queue.push_back(key);
        true
    }

    pub(crate) fn has(&self, key: Key) -> bool {
        match key {
            Key::S(c, d) => self.s[c as usize].contains_key(&d),
            Key::R(role, c, d) => self.r.get(&role).is_some_and(|m| m.contains_key(&(c, d))),
        }
    }

    pub(crate) fn info(&self, key: Key) -> Option<&Info> {
        match key {
            Key::S(c, d) => self.s.get(c as usize)?.get(&d),
            Key::R(role, c, d) => self.r.get(&role)?.get(&(c, d)),
        }
    }

    pub(crate) fn s_has(&self, c: Id, d: Id) -> bool {
        self.s[c as usize].contains_key(&d)
    }

    /// Successors of `c` along `role`.
    pub(crate) fn successors(&self, c: Id, role: Name) -> Vec<Id> {
        self.succ[c as usize]
            .range((role, 0)..=(role, Id::MAX))
            .map(|&(_, d)| d)
            .collect()
    }

    /// Predecessors of `d` along `role`.
    pub(crate) fn predecessors(&self, d: Id, role: Name) -> Vec<Id> {
        self.pred[d as usize]
            .range((role, 0)..=(role, Id::MAX))
            .map(|&(_, c)| c)
            .collect()
    }

    pub(crate) fn concept(&self, id: Id) -> &Concept {
        if id == self.bottom() {
            &BOTTOM
        } else {
            self.bc.get(id as usize).expect("valid basic concept id")
        }
    }

    pub(crate) fn id(&self, c: &Concept) -> Option<Id> {
        match c {
            Concept::Bottom => Some(self.bottom()),
            c => self.bc.index_of(c).map(|i| i as Id),
        }
    }

    pub(crate) fn key_of(&self, entry: &Entry) -> Option<Key> {
        match entry {
            Entry::S { subsumee, subsumer } => {
                let c = self.bc.index_of(subsumee)? as Id;
                Some(Key::S(c, self.id(subsumer)?))
            }
            Entry::R { role, from, to } => Some(Key::R(
                *role,
                self.bc.index_of(from)? as Id,
                self.bc.index_of(to)? as Id,
            )),
        }
    }

    pub(crate) fn entry_of(&self, key: Key) -> Entry {
        match key {
            Key::S(c, d) => Entry::s(self.concept(c).clone(), self.concept(d).clone()),
            Key::R(role, c, d) => Entry::r(role, self.concept(c).clone(), self.concept(d).clone()),
        }
    }

    pub(crate) fn keys(&self) -> Vec<Key> {
        let mut out: Vec<Key> = Vec::new();
        for (c, set) in self.s.iter().enumerate() {
            out.extend(set.keys().map(|&d| Key::S(c as Id, d)));
        }
        for (&role, edges) in &self.r {
            out.extend(edges.keys().map(|&(c, d)| Key::R(role, c, d)));
        }
        out
    }

    pub(crate) fn is_nominal(&self, id: Id) -> bool {
        matches!(self.concept(id), Concept::Nominal(_))
    }

    pub(crate) fn nominal_ids(&self) -> Vec<Id> {
        (0..self.bc.len() as Id)
            .filter(|&i| self.is_nominal(i))
            .collect()
    }

    /// Shortest edge path into `target` from `source`, or from any nominal
    /// when nominal roots are enabled. An empty path means `target` is itself
    /// a root.
    pub(crate) fn path(&self, source: Id, target: Id) -> Option<Vec<Key>> {
        let mut roots = vec![source];
        if self.config.nominal_roots {
            roots.extend(self.nominal_ids());
        }
        self.bfs(&roots, target)
    }

    pub(crate) fn bfs(&self, roots: &[Id], target: Id) -> Option<Vec<Key>> {
        let mut parent: BTreeMap<Id, Option<Key>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &r in roots {
            if parent.insert(r, None).is_none() {
                queue.push_back(r);
            }
        }
        while let Some(c) = queue.pop_front() {
            if c == target {
                let mut path = Vec::new();
                let mut cur = c;
                while let Some(Some(k)) = parent.get(&cur) {
                    path.push(*k);
                    let Key::R(_, from, _) = *k else {
                        unreachable!()
                    };
                    cur = from;
                }
                path.reverse();
                return Some(path);
            }
            for &(role, d) in &self.succ[c as usize] {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(d) {
                    e.insert(Some(Key::R(role, c, d)));
                    queue.push_back(d);
                }
            }
        }
        None
    }

    fn derivation_of(&self, raw: &Raw) -> Derivation {
        match raw {
            Raw::Init => Derivation::Init,
            Raw::ByRule { rule, premises } => Derivation::ByRule {
                rule: *rule,
                premises: premises
                    .iter()
                    .map(|p| match p {
                        RawPremise::Key(k) => Premise::Entry(self.entry_of(*k)),
                        RawPremise::Axiom(i) => Premise::Axiom(*i),
                    })
                    .collect(),
            },
            Raw::ExistsR { member, axiom } => Derivation::ExistsR {
                member: self.entry_of(*member),
                axiom: *axiom,
            },
            Raw::TransR { edge, axiom } => Derivation::TransR {
                edge: self.entry_of(*edge),
                axiom: *axiom,
            },
            Raw::SplitR { left, right, axiom } => Derivation::SplitR {
                left: self.entry_of(*left),
                right: self.entry_of(*right),
                axiom: *axiom,
            },
        }
    }

    // Public, concept-level view.

    pub fn basic_concepts(&self) -> &BasicConceptSet {
        &self.bc
    }

    pub fn config(&self) -> ClassifierConfig {
        self.config
    }

    /// S(c) in insertion order; ⊥ appears as [`Concept::Bottom`].
    pub fn subsumers(&self, c: &Concept) -> Option<Vec<&Concept>> {
        let i = self.bc.index_of(c)?;
        Some(self.s[i].keys().map(|&d| self.concept(d)).collect())
    }

    /// S(c) as a set.
    pub fn subsumer_set(&self, c: &Concept) -> Option<BTreeSet<Concept>> {
        self.subsumers(c).map(|v| v.into_iter().cloned().collect())
    }

    pub fn has_subsumer(&self, c: &Concept, d: &Concept) -> bool {
        match (self.bc.index_of(c), self.id(d)) {
            (Some(c), Some(d)) => self.s_has(c as Id, d),
            _ => false,
        }
    }

    /// R(role) as a set of pairs.
    pub fn edges(&self, role: Name) -> BTreeSet<(Concept, Concept)> {
        self.r
            .get(&role)
            .map(|m| {
                m.keys()
                    .map(|&(c, d)| (self.concept(c).clone(), self.concept(d).clone()))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn has_edge(&self, role: Name, c: &Concept, d: &Concept) -> bool {
        match (self.bc.index_of(c), self.bc.index_of(d)) {
            (Some(c), Some(d)) => self.has(Key::R(role, c as Id, d as Id)),
            _ => false,
        }
    }

    /// Roles with at least one edge or declared in the classified kb.
    pub fn roles(&self) -> impl Iterator<Item = Name> + '_ {
        self.r.keys().copied()
    }

    pub fn contains(&self, entry: &Entry) -> bool {
        self.key_of(entry).is_some_and(|k| self.has(k))
    }

    /// Every S- and R-entry.
    pub fn entries(&self) -> Vec<Entry> {
        self.keys().into_iter().map(|k| self.entry_of(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.s.iter().map(|m| m.len()).sum::<usize>()
            + self.r.values().map(|m| m.len()).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn derivation(&self, entry: &Entry) -> Option<Derivation> {
        let key = self.key_of(entry)?;
        self.info(key).map(|i| self.derivation_of(&i.raw))
    }

    /// `c = d`, or a chain of R-edges leads from `c` to `d`.
    pub fn reachable(&self, c: &Concept, d: &Concept) -> bool {
        match (self.bc.index_of(c), self.bc.index_of(d)) {
            (Some(c), Some(d)) => self.bfs(&[c as Id], d as Id).is_some(),
            _ => false,
        }
    }

    /// Reachability as used by CR6: like [`reachable`](Self::reachable) but
    /// the path may also start at any nominal when nominal roots are on.
    pub fn reachable_cr6(&self, c: &Concept, d: &Concept) -> bool {
        match (self.bc.index_of(c), self.bc.index_of(d)) {
            (Some(c), Some(d)) => self.path(c as Id, d as Id).is_some(),
            _ => false,
        }
    }
}

/// Two states agree on every S- and R-entry.
impl PartialEq for ClassificationState {
    fn eq(&self, other: &Self) -> bool {
        let sets =
            |st: &ClassificationState| -> BTreeSet<Entry> { st.entries().into_iter().collect() };
        sets(self) == sets(other)
    }
}
