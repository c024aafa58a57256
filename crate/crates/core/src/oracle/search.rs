//! Bounded countermodel search by lazy model construction.
//!
//! Element 0 is the witness that must lie in C but not in D. Individuals are
//! first placed on elements, then the search alternates between a
//! deterministic closure (adding every concept membership and role edge the
//! constraints force) and a branching step on one unsatisfied existential
//! restriction (which element serves as the successor) or one undefined
//! feature (which pool value it takes).
//!
//! Exhaustiveness for the abstract fragment: if a countermodel J with at
//! most `max_size` elements exists, the branch that always picks the
//! successor J picked (an existing element if J's successor already has a
//! preimage, otherwise a fresh one) keeps an injective homomorphism into J.
//! Every membership that branch derives also holds in J, so it never fails
//! and never exceeds the bound. Feature values are limited to the pools, so
//! this argument does not extend to concrete domains.
//!
//! Backjumping. Every fact carries the set of decisions (by depth on the
//! current path) it was derived from, including the decisions that created
//! the elements it mentions. A failure is explained by the union of the
//! facts it used. When every option of a decision fails, the explanation is
//! the union of the option explanations minus the decision itself, plus the
//! facts that raised the choice, plus every element-creating decision if the
//! size bound suppressed the fresh option. An option whose explanation does
//! not mention the current decision refutes its siblings too, since the
//! facts it used are present in all of them, so they are skipped.

use std::collections::{BTreeMap, BTreeSet};

use super::{interpret, is_model, CandidatePools, FiniteInterpretation, OracleError};
use crate::cdomains::{apply_predicate, DomainId, Value};
use crate::kb::{Concept, Constraint, KnowledgeBase, Name};

/// Node budget used when the caller has no preference.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A model of the kb with element 0 in C and not in D.
    Found(FiniteInterpretation),
    /// The bounded search is exhausted.
    NotFound,
    /// The node budget ran out first.
    BudgetExceeded,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

/// A set of decision depths.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Deps(Vec<u64>);

impl Deps {
    fn single(d: usize) -> Self {
        let mut s = Deps::default();
        s.insert(d);
        s
    }

    fn insert(&mut self, d: usize) {
        let (w, b) = (d / 64, d % 64);
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << b;
    }

    fn remove(&mut self, d: usize) {
        if let Some(w) = self.0.get_mut(d / 64) {
            *w &= !(1 << (d % 64));
        }
    }

    fn contains(&self, d: usize) -> bool {
        self.0.get(d / 64).is_some_and(|w| w & (1 << (d % 64)) != 0)
    }

    fn union(&mut self, other: &Deps) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn with(mut self, other: &Deps) -> Self {
        self.union(other);
        self
    }
}

#[derive(Clone)]
struct Partial<'a> {
    n: usize,
    birth: Vec<Deps>,
    /// Decisions that created an element.
    births: Deps,
    labels: Vec<BTreeMap<Name, Deps>>,
    edges: BTreeMap<(Name, usize, usize), Deps>,
    ind: BTreeMap<Name, (usize, Deps)>,
    feats: Vec<BTreeMap<Name, (Value, Deps)>>,
    /// Memberships that must hold (fillers of chosen successors).
    demands: Vec<(usize, &'a Concept, Deps)>,
    /// The successor committed to each filler, in shaped mode.
    designated: BTreeMap<&'a Concept, usize>,
}

impl<'a> Partial<'a> {
    fn root() -> Self {
        Partial {
            n: 1,
            birth: vec![Deps::default()],
            births: Deps::default(),
            labels: vec![BTreeMap::new()],
            edges: BTreeMap::new(),
            ind: BTreeMap::new(),
            feats: vec![BTreeMap::new()],
            demands: Vec::new(),
            designated: BTreeMap::new(),
        }
    }

    fn add_element(&mut self, depth: usize) -> usize {
        self.birth.push(Deps::single(depth));
        self.births.insert(depth);
        self.labels.push(BTreeMap::new());
        self.feats.push(BTreeMap::new());
        self.n += 1;
        self.n - 1
    }

    fn successors(&self, e: usize, r: Name) -> impl Iterator<Item = (usize, &Deps)> + '_ {
        self.edges
            .range((r, e, 0)..=(r, e, usize::MAX))
            .map(|(&(_, _, y), d)| (y, d))
    }

    /// Whether `e` is in `c`, with the decisions that make it so.
    fn holds(&self, e: usize, c: &Concept) -> Option<Deps> {
        match c {
            Concept::Top => Some(self.birth[e].clone()),
            Concept::Bottom => None,
            Concept::Atomic(a) => self.labels[e].get(a).cloned(),
            Concept::Nominal(a) => match self.ind.get(a) {
                Some((x, d)) if *x == e => Some(d.clone().with(&self.birth[e])),
                _ => None,
            },
            Concept::Conj(l, r) => Some(self.holds(e, l)?.with(&self.holds(e, r)?)),
            Concept::Exists(r, f) => self
                .successors(e, *r)
                .find_map(|(y, d)| Some(self.holds(y, f)?.with(d))),
            Concept::Pred(atom) => {
                let mut deps = self.birth[e].clone();
                let mut values = Vec::new();
                for f in &atom.features {
                    let (v, d) = self.feats[e].get(f)?;
                    values.push(v.clone());
                    deps.union(d);
                }
                apply_predicate(&atom.predicate, &values)
                    .unwrap_or(false)
                    .then_some(deps)
            }
        }
    }
}

enum Choice<'a> {
    Successor(usize, Name, &'a Concept),
    Value(usize, Name, DomainId),
}

/// Why a branch failed.
type Conflict = Deps;

struct Search<'a> {
    gcis: Vec<(&'a Concept, &'a Concept)>,
    chains: Vec<(&'a [Name], Name)>,
    c: &'a Concept,
    d: &'a Concept,
    pools: &'a CandidatePools,
    max: usize,
    backjump: bool,
    shaped: bool,
    /// Whether the size bound suppressed a fresh element anywhere.
    capped: bool,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

enum Step<'a> {
    Model(Partial<'a>),
    Fail(Conflict),
    Abort,
}

impl<'a> Search<'a> {
    fn demand(
        &self,
        p: &mut Partial<'a>,
        e: usize,
        c: &'a Concept,
        why: &Deps,
        changed: &mut bool,
        choices: &mut Vec<(Choice<'a>, Deps)>,
    ) -> Result<(), Conflict> {
        if p.holds(e, c).is_some() {
            return Ok(());
        }
        let why = why.clone().with(&p.birth[e]);
        match c {
            Concept::Top => Ok(()),
            Concept::Bottom => Err(why),
            Concept::Nominal(a) => {
                let placed = p.ind.get(a).map(|(_, d)| d.clone()).unwrap_or_default();
                Err(why.with(&placed))
            }
            Concept::Atomic(a) => {
                p.labels[e].insert(*a, why);
                *changed = true;
                Ok(())
            }
            Concept::Conj(l, r) => {
                self.demand(p, e, l, &why, changed, choices)?;
                self.demand(p, e, r, &why, changed, choices)
            }
            Concept::Exists(r, f) => {
                // A successor already committed to the filler discharges it.
                let pending = p
                    .demands
                    .iter()
                    .any(|&(y, g, _)| g == &**f && p.edges.contains_key(&(*r, e, y)));
                if !pending {
                    choices.push((Choice::Successor(e, *r, f), why));
                }
                Ok(())
            }
            Concept::Pred(atom) => {
                match atom.features.iter().find(|f| !p.feats[e].contains_key(f)) {
                    Some(&f) => {
                        choices.push((Choice::Value(e, f, atom.domain()), why));
                        Ok(())
                    }
                    None => {
                        let mut why = why;
                        for f in &atom.features {
                            why.union(&p.feats[e][f].1);
                        }
                        Err(why)
                    }
                }
            }
        }
    }

    /// Applies everything forced; returns the open choices.
    fn close(&self, p: &mut Partial<'a>) -> Result<Vec<(Choice<'a>, Deps)>, Conflict> {
        loop {
            let mut changed = false;
            let mut choices = Vec::new();
            let none = Deps::default();
            self.demand(p, 0, self.c, &none, &mut changed, &mut choices)?;
            for i in 0..p.demands.len() {
                let (e, c, why) = p.demands[i].clone();
                self.demand(p, e, c, &why, &mut changed, &mut choices)?;
            }
            for &(lhs, rhs) in &self.gcis {
                for e in 0..p.n {
                    if let Some(why) = p.holds(e, lhs) {
                        self.demand(p, e, rhs, &why, &mut changed, &mut choices)?;
                    }
                }
            }
            for &(chain, sup) in &self.chains {
                let mut pairs: BTreeMap<(usize, usize), Deps> =
                    (0..p.n).map(|e| ((e, e), p.birth[e].clone())).collect();
                for &r in chain {
                    let mut next = BTreeMap::new();
                    for (&(a, b), d) in &pairs {
                        for (c, dc) in p.successors(b, r) {
                            next.entry((a, c)).or_insert_with(|| d.clone().with(dc));
                        }
                    }
                    pairs = next;
                }
                for ((a, b), d) in pairs {
                    if let std::collections::btree_map::Entry::Vacant(v) =
                        p.edges.entry((sup, a, b))
                    {
                        v.insert(d);
                        changed = true;
                    }
                }
            }
            if let Some(why) = p.holds(0, self.d) {
                return Err(why);
            }
            if !changed {
                return Ok(choices);
            }
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
        }
        !self.exhausted
    }

    /// Tries each option of the decision at `depth`; `extra` explains why
    /// the decision had to be made.
    fn branch(
        &mut self,
        depth: usize,
        options: Vec<Partial<'a>>,
        mut extra: Deps,
        next: &dyn Fn(&mut Self, Partial<'a>) -> Step<'a>,
    ) -> Step<'a> {
        for q in options {
            match next(self, q) {
                Step::Fail(c) if self.backjump && !c.contains(depth) => return Step::Fail(c),
                Step::Fail(mut c) => {
                    c.remove(depth);
                    extra.union(&c);
                }
                other => return other,
            }
        }
        Step::Fail(extra)
    }

    /// The fresh element option, or the size-bound explanation when it is
    /// suppressed.
    fn fresh(&mut self, p: &Partial<'a>, extra: &mut Deps) -> bool {
        if p.n < self.max {
            true
        } else {
            self.capped = true;
            extra.union(&p.births);
            false
        }
    }

    fn place(&mut self, p: Partial<'a>, pending: &[Name], depth: usize) -> Step<'a> {
        let Some((&a, rest)) = pending.split_first() else {
            return self.grow(p, depth);
        };
        if !self.tick() {
            return Step::Abort;
        }
        let mut extra = Deps::default();
        let mut targets: Vec<usize> = (0..p.n).collect();
        if self.fresh(&p, &mut extra) {
            targets.push(p.n);
        }
        let options = targets
            .into_iter()
            .map(|e| {
                let mut q = p.clone();
                if e == q.n {
                    q.add_element(depth);
                }
                q.ind.insert(a, (e, Deps::single(depth)));
                q
            })
            .collect();
        let rest = rest.to_vec();
        self.branch(depth, options, extra, &move |s, q| {
            s.place(q, &rest, depth + 1)
        })
    }

    fn grow(&mut self, mut p: Partial<'a>, depth: usize) -> Step<'a> {
        if !self.tick() {
            return Step::Abort;
        }
        let choices = match self.close(&mut p) {
            Ok(c) => c,
            Err(conflict) => return Step::Fail(conflict),
        };
        let Some((choice, why)) = choices.into_iter().next() else {
            return Step::Model(p);
        };
        let mut extra = why.clone();
        let here = Deps::single(depth).with(&why);
        let options: Vec<Partial<'a>> = match choice {
            Choice::Successor(e, r, f) => {
                let mut targets: Vec<usize> = match p.designated.get(f) {
                    Some(&y) if self.shaped => vec![y],
                    _ if self.shaped => p.ind.values().map(|(x, _)| *x).collect(),
                    _ => (0..p.n).collect(),
                };
                targets.sort_unstable();
                targets.dedup();
                if !(self.shaped && p.designated.contains_key(f)) && self.fresh(&p, &mut extra) {
                    targets.push(p.n);
                }
                targets
                    .into_iter()
                    .map(|y| {
                        let mut q = p.clone();
                        if y == q.n {
                            q.add_element(depth);
                        }
                        q.edges.insert((r, e, y), here.clone());
                        let d = here.clone().with(&q.birth[y]);
                        q.demands.push((y, f, d));
                        if self.shaped {
                            q.designated.insert(f, y);
                        }
                        q
                    })
                    .collect()
            }
            Choice::Value(e, f, dom) => self
                .pools
                .values(dom)
                .into_iter()
                .map(|v| {
                    let mut q = p.clone();
                    q.feats[e].insert(f, (v, here.clone()));
                    q
                })
                .collect(),
        };
        self.branch(depth, options, extra, &move |s, q| s.grow(q, depth + 1))
    }
}

/// Searches for a model of `kb` with an element in `c` but not in `d`,
/// with domain sizes 1, 2, …, `max_size` in turn.
pub fn find_countermodel(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
    max_size: usize,
    pools: &CandidatePools,
    budget: u64,
) -> Result<SearchOutcome, OracleError> {
    search(
        kb,
        c,
        d,
        max_size,
        pools,
        budget,
        Mode::Exhaustive { backjump: true },
    )
}

/// Searches only models in which every existential restriction `∃r.F` is
/// witnessed by one element committed to the filler `F`, or by an
/// individual.
///
/// This is the shape of the canonical model of a classification, so the
/// search is complete for the abstract fragment whenever that construction
/// is; it does not rely on any state of the reasoner. It branches only on
/// individual placement, on which individual (if any) each filler element
/// coincides with, and on feature values, so it stays small where the
/// exhaustive search does not. Domains never exceed one element per filler
/// and individual plus the witness, so no size bound is taken.
pub fn find_shaped_countermodel(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
    pools: &CandidatePools,
    budget: u64,
) -> Result<SearchOutcome, OracleError> {
    search(kb, c, d, usize::MAX, pools, budget, Mode::Shaped)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Exhaustive { backjump: bool },
    Shaped,
}

fn search(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
    max_size: usize,
    pools: &CandidatePools,
    budget: u64,
    mode: Mode,
) -> Result<SearchOutcome, OracleError> {
    let mut relevant: BTreeSet<Name> = BTreeSet::new();
    for con in &kb.constraints {
        relevant.extend(con.names());
    }
    relevant.extend(c.names());
    relevant.extend(d.names());
    for n in &relevant {
        if !kb.is_declared(*n) {
            return Err(OracleError::Uninterpreted(*n));
        }
    }
    let individuals: Vec<Name> = kb
        .individuals()
        .iter()
        .copied()
        .filter(|i| relevant.contains(i))
        .collect();

    let mut search = Search {
        gcis: kb.gcis().collect(),
        chains: kb
            .constraints
            .iter()
            .filter_map(|c| match c {
                Constraint::RoleInclusion { chain, sup } => Some((chain.as_slice(), *sup)),
                _ => None,
            })
            .collect(),
        c,
        d,
        pools,
        max: 0,
        backjump: mode == Mode::Exhaustive { backjump: true },
        shaped: mode == Mode::Shaped,
        capped: false,
        nodes: 0,
        budget,
        exhausted: false,
    };
    let sizes = if mode == Mode::Shaped {
        max_size..=max_size
    } else {
        1..=max_size
    };
    for size in sizes {
        search.max = size;
        search.capped = false;
        match search.place(Partial::root(), &individuals, 0) {
            Step::Model(p) => {
                let model = to_interpretation(kb, &p);
                let verified = is_model(&model, kb)?
                    && interpret(c, &model)?.contains(&0)
                    && !interpret(d, &model)?.contains(&0);
                if !verified {
                    return Err(OracleError::InvalidCandidate);
                }
                return Ok(SearchOutcome::Found(model));
            }
            Step::Abort => return Ok(SearchOutcome::BudgetExceeded),
            // Larger bounds explore the same tree when the bound never bit.
            Step::Fail(_) if !search.capped => break,
            Step::Fail(_) => {}
        }
    }
    Ok(SearchOutcome::NotFound)
}

fn to_interpretation(kb: &KnowledgeBase, p: &Partial) -> FiniteInterpretation {
    let mut i = FiniteInterpretation {
        size: p.n,
        ..Default::default()
    };
    for (e, labels) in p.labels.iter().enumerate() {
        for &a in labels.keys() {
            i.concepts.entry(a).or_default().insert(e);
        }
    }
    for &(r, x, y) in p.edges.keys() {
        i.roles.entry(r).or_default().insert((x, y));
    }
    i.individuals = p.ind.iter().map(|(&a, (e, _))| (a, *e)).collect();
    for (e, fs) in p.feats.iter().enumerate() {
        for (f, (v, _)) in fs {
            i.features.entry(*f).or_default().insert(e, v.clone());
        }
    }
    i.cover(kb);
    i
}
