use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::index::RuleIndex;
use super::state::{ClassificationState, Id, Key, Raw, RawPremise};
use super::Rule;
use crate::cdomains::{self, DomainId, PredicateAtom, Satisfiability};
use crate::kb::{Concept, KnowledgeBase};

/// Runs CR1–CR11 to the least fixpoint.
///
/// Rules other than CR6 run semi-naively off a worklist of new entries.
/// CR6 needs a global view of reachability, so it runs as a separate pass
/// once the worklist is empty; the two alternate until neither adds anything.
pub fn saturate(kb: &KnowledgeBase, state: ClassificationState) -> ClassificationState {
    let index = RuleIndex::build(kb, &state);
    let rng = state.config.shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    let mut run = Saturation {
        ix: index,
        st: state,
        rng,
        concrete_cache: BTreeMap::new(),
    };
    loop {
        run.drain();
        if !run.nominal_pass() {
            break;
        }
    }
    run.st
}

struct Saturation {
    ix: RuleIndex,
    st: ClassificationState,
    rng: Option<ChaCha8Rng>,
    /// Atom sets on which CR7/CR8 last ran, per (concept, domain).
    concrete_cache: BTreeMap<(Id, DomainId), Vec<Id>>,
}

fn by_rule(rule: Rule, keys: &[Key], axiom: Option<usize>) -> Raw {
    let mut premises: Vec<RawPremise> = keys.iter().map(|&k| RawPremise::Key(k)).collect();
    premises.extend(axiom.map(RawPremise::Axiom));
    Raw::ByRule { rule, premises }
}

impl Saturation {
    fn next(&mut self) -> Option<Key> {
        match &mut self.rng {
            None => self.st.queue.pop_front(),
            Some(rng) if !self.st.queue.is_empty() => {
                let i = rng.gen_range(0..self.st.queue.len());
                self.st.queue.swap_remove_back(i)
            }
            Some(_) => None,
        }
    }

    fn drain(&mut self) {
        while let Some(key) = self.next() {
            match key {
                Key::S(c, x) => self.on_subsumer(c, x),
                Key::R(r, c, d) => self.on_edge(r, c, d),
            }
        }
    }

    fn on_subsumer(&mut self, c: Id, x: Id) {
        let bot = self.st.bottom();
        let new = Key::S(c, x);
        if x == bot {
            // CR5, backwards along every incoming edge
            let preds: Vec<_> = self.st.pred[c as usize].iter().copied().collect();
            for (r, p) in preds {
                self.st.insert(
                    Key::S(p, bot),
                    by_rule(Rule::Cr5, &[Key::R(r, p, c), new], None),
                );
            }
            return;
        }
        for &(d, ax) in self.ix.told.get(&x).into_iter().flatten() {
            self.st
                .insert(Key::S(c, d), by_rule(Rule::Cr1, &[new], Some(ax)));
        }
        for &(y, d, ax) in self.ix.conj.get(&x).into_iter().flatten() {
            if self.st.s_has(c, y) {
                self.st.insert(
                    Key::S(c, d),
                    by_rule(Rule::Cr2, &[new, Key::S(c, y)], Some(ax)),
                );
            }
        }
        for &(r, y, ax) in self.ix.exists_rhs.get(&x).into_iter().flatten() {
            self.st.insert(
                Key::R(r, c, y),
                Raw::ExistsR {
                    member: new,
                    axiom: ax,
                },
            );
        }
        for &(r, e, ax) in self.ix.exists_filler.get(&x).into_iter().flatten() {
            for p in self.st.predecessors(c, r) {
                self.st.insert(
                    Key::S(p, e),
                    by_rule(Rule::Cr4, &[Key::R(r, p, c), new], Some(ax)),
                );
            }
        }
        if matches!(self.st.concept(x), Concept::Pred(_)) {
            self.concrete(c);
        }
    }

    fn on_edge(&mut self, r: crate::kb::Name, c: Id, d: Id) {
        let bot = self.st.bottom();
        let edge = Key::R(r, c, d);
        if self.st.s_has(d, bot) {
            self.st.insert(
                Key::S(c, bot),
                by_rule(Rule::Cr5, &[edge, Key::S(d, bot)], None),
            );
        }
        let members: Vec<Id> = self.st.s[d as usize].keys().copied().collect();
        for y in members {
            for &(e, ax) in self.ix.exists_lhs.get(&(r, y)).into_iter().flatten() {
                self.st.insert(
                    Key::S(c, e),
                    by_rule(Rule::Cr4, &[edge, Key::S(d, y)], Some(ax)),
                );
            }
        }
        for &(s, ax) in self.ix.sub.get(&r).into_iter().flatten() {
            self.st
                .insert(Key::R(s, c, d), Raw::TransR { edge, axiom: ax });
        }
        for &(r2, s, ax) in self.ix.chain_left.get(&r).into_iter().flatten() {
            for e in self.st.successors(d, r2) {
                self.st.insert(
                    Key::R(s, c, e),
                    Raw::SplitR {
                        left: edge,
                        right: Key::R(r2, d, e),
                        axiom: ax,
                    },
                );
            }
        }
        for &(r1, s, ax) in self.ix.chain_right.get(&r).into_iter().flatten() {
            for b in self.st.predecessors(c, r1) {
                self.st.insert(
                    Key::R(s, b, d),
                    Raw::SplitR {
                        left: Key::R(r1, b, c),
                        right: edge,
                        axiom: ax,
                    },
                );
            }
        }
    }

    /// CR7, CR8 and CR9 for one concept.
    fn concrete(&mut self, c: Id) {
        let bot = self.st.bottom();
        let mut by_domain: BTreeMap<DomainId, Vec<Id>> = BTreeMap::new();
        for &x in self.st.s[c as usize].keys() {
            if let Concept::Pred(a) = self.st.concept(x) {
                by_domain.entry(a.domain()).or_default().push(x);
            }
        }
        let atom = |st: &ClassificationState, x: Id| -> PredicateAtom {
            match st.concept(x) {
                Concept::Pred(a) => a.clone(),
                _ => unreachable!("atom ids point at predicate atoms"),
            }
        };

        // CR9: one feature constrained by two domains
        let domains: Vec<DomainId> = by_domain.keys().copied().collect();
        for (i, d1) in domains.iter().enumerate() {
            for d2 in &domains[i + 1..] {
                for &x in &by_domain[d1] {
                    for &y in &by_domain[d2] {
                        let (ax, ay) = (atom(&self.st, x), atom(&self.st, y));
                        if ax.features.iter().any(|f| ay.features.contains(f)) {
                            self.st.insert(
                                Key::S(c, bot),
                                by_rule(Rule::Cr9, &[Key::S(c, x), Key::S(c, y)], None),
                            );
                        }
                    }
                }
            }
        }

        for (dm, mut ids) in by_domain {
            ids.sort_unstable();
            if self.concrete_cache.get(&(c, dm)) == Some(&ids) {
                continue;
            }
            self.concrete_cache.insert((c, dm), ids.clone());
            let conj: Vec<PredicateAtom> = ids.iter().map(|&x| atom(&self.st, x)).collect();
            let keys: Vec<Key> = ids.iter().map(|&x| Key::S(c, x)).collect();
            let decider = cdomains::domain(dm);
            let sat = decider
                .satisfiable(&conj)
                .expect("atoms were partitioned by domain");
            if sat == Satisfiability::Unsat {
                self.st
                    .insert(Key::S(c, bot), by_rule(Rule::Cr7, &keys, None));
            }
            let goals: Vec<Id> = self
                .ix
                .atoms
                .iter()
                .copied()
                .filter(|&g| !self.st.s_has(c, g))
                .collect();
            for g in goals {
                let goal = atom(&self.st, g);
                if goal.domain() != dm {
                    continue;
                }
                let implied = decider
                    .implies(&conj, &goal)
                    .expect("atoms were partitioned by domain");
                if implied {
                    self.st
                        .insert(Key::S(c, g), by_rule(Rule::Cr8, &keys, None));
                }
            }
        }
    }

    /// CR6 over every pair sharing a nominal. Returns whether anything was
    /// added.
    fn nominal_pass(&mut self) -> bool {
        let mut changed = false;
        let n = self.st.bc.len() as Id;
        for a in self.st.nominal_ids() {
            let holders: Vec<Id> = (0..n).filter(|&c| self.st.s_has(c, a)).collect();
            for &c in &holders {
                for &d in &holders {
                    if c == d {
                        continue;
                    }
                    let missing: Vec<Id> = self.st.s[d as usize]
                        .keys()
                        .copied()
                        .filter(|&x| !self.st.s_has(c, x))
                        .collect();
                    if missing.is_empty() {
                        continue;
                    }
                    let Some(path) = self.st.path(c, d) else {
                        continue;
                    };
                    let mut keys = vec![Key::S(c, a), Key::S(d, a)];
                    keys.extend(path);
                    for x in missing {
                        let mut premises = keys.clone();
                        premises.push(Key::S(d, x));
                        changed |= self
                            .st
                            .insert(Key::S(c, x), by_rule(Rule::Cr6, &premises, None));
                    }
                }
            }
        }
        changed
    }
}
