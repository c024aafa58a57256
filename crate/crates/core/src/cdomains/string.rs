use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{
    feature_set, foreign, Assignment, ConcreteDomain, DomainError, DomainId, Predicate,
    PredicateAtom, Satisfiability, Value,
};
use crate::kb::Name;

/// Predicates of the string domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StringPredicate {
    /// v is a string
    Top,
    /// v = w
    Eq(String),
    /// v2 = v1 · w
    Concat(String),
    /// v1 = v2
    Same,
}

impl StringPredicate {
    pub fn arity(&self) -> usize {
        match self {
            StringPredicate::Top | StringPredicate::Eq(_) => 1,
            StringPredicate::Concat(_) | StringPredicate::Same => 2,
        }
    }

    pub fn word(&self) -> Option<&str> {
        match self {
            StringPredicate::Eq(w) | StringPredicate::Concat(w) => Some(w),
            _ => None,
        }
    }
}

/// Escapes a word for the `"…"` literal syntax.
pub fn quote(w: &str) -> String {
    let mut out = String::with_capacity(w.len() + 2);
    out.push('"');
    for ch in w.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{{{:x}}}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl fmt::Display for StringPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StringPredicate::Top => f.write_str("top"),
            StringPredicate::Eq(w) => write!(f, "eq[{}]", quote(w)),
            StringPredicate::Concat(w) => write!(f, "concat[{}]", quote(w)),
            StringPredicate::Same => f.write_str("same"),
        }
    }
}

/// The domain of finite strings over Unicode scalar values.
#[derive(Clone, Copy, Debug, Default)]
pub struct StringDomain;

fn predicate(p: &Predicate) -> Result<&StringPredicate, DomainError> {
    match p {
        Predicate::String(s) => Ok(s),
        other => Err(foreign(DomainId::String, other)),
    }
}

struct Unsat;

/// Equality classes of features joined by edges `src →w dst` meaning
/// `dst = src · w` with `w` nonempty.
struct WordGraph {
    parent: Vec<usize>,
    constant: Vec<Option<String>>,
    edges: BTreeSet<(usize, String, usize)>,
}

/// Value of a class after saturation: a fixed string, or a free root
/// followed by a fixed suffix.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Term {
    Fixed(String),
    Free(usize, String),
}

impl Term {
    fn append(&self, w: &str) -> Term {
        match self {
            Term::Fixed(s) => Term::Fixed(format!("{s}{w}")),
            Term::Free(r, s) => Term::Free(*r, format!("{s}{w}")),
        }
    }
}

fn strip_suffix<'a>(s: &'a str, suffix: &str) -> Option<&'a str> {
    s.strip_suffix(suffix)
}

impl WordGraph {
    fn new(n: usize) -> Self {
        WordGraph {
            parent: (0..n).collect(),
            constant: vec![None; n],
            edges: BTreeSet::new(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn set_constant(&mut self, x: usize, c: String) -> Result<bool, Unsat> {
        let r = self.find(x);
        match &self.constant[r] {
            Some(old) if *old == c => Ok(false),
            Some(_) => Err(Unsat),
            None => {
                self.constant[r] = Some(c);
                Ok(true)
            }
        }
    }

    fn union(&mut self, a: usize, b: usize) -> Result<bool, Unsat> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return Ok(false);
        }
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[gone] = keep;
        if let Some(c) = self.constant[gone].take() {
            self.set_constant(keep, c)?;
        }
        Ok(true)
    }

    fn add_edge(&mut self, src: usize, w: &str, dst: usize) -> Result<(), Unsat> {
        if w.is_empty() {
            self.union(src, dst)?;
        } else {
            self.edges.insert((src, w.to_string(), dst));
        }
        Ok(())
    }

    fn canonical_edges(&mut self) -> Result<(), Unsat> {
        let old = std::mem::take(&mut self.edges);
        for (a, w, b) in old {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                // b = b·w with w nonempty
                return Err(Unsat);
            }
            self.edges.insert((a, w, b));
        }
        Ok(())
    }

    /// One round of the saturation rules; returns whether anything changed.
    fn step(&mut self) -> Result<bool, Unsat> {
        self.canonical_edges()?;
        let edges: Vec<_> = self.edges.iter().cloned().collect();

        // constants flow forward (append) and backward (strip suffix)
        let mut changed = false;
        for (a, w, b) in &edges {
            if let Some(c) = self.constant[*a].clone() {
                changed |= self.set_constant(*b, format!("{c}{w}"))?;
            }
            let rb = self.find(*b);
            if let Some(d) = self.constant[rb].clone() {
                let prefix = strip_suffix(&d, w).ok_or(Unsat)?.to_string();
                changed |= self.set_constant(*a, prefix)?;
            }
        }
        if changed {
            return Ok(true);
        }

        // equal source and label: targets coincide
        let mut by_source: BTreeMap<(usize, &str), usize> = BTreeMap::new();
        for (a, w, b) in &edges {
            if let Some(&other) = by_source.get(&(*a, w.as_str())) {
                if other != *b {
                    self.union(other, *b)?;
                    return Ok(true);
                }
            } else {
                by_source.insert((*a, w.as_str()), *b);
            }
        }

        // two edges into one class: the shorter label is a suffix of the longer
        let mut by_target: BTreeMap<usize, (usize, &str)> = BTreeMap::new();
        for (a, w, b) in &edges {
            match by_target.get(b) {
                None => {
                    by_target.insert(*b, (*a, w.as_str()));
                }
                Some(&(a0, w0)) => {
                    let ((x, u), (y, v)) = if w0.len() <= w.len() {
                        ((a0, w0), (*a, w.as_str()))
                    } else {
                        ((*a, w.as_str()), (a0, w0))
                    };
                    // b = x·u = y·v, |u| ≤ |v|  ⇒  v = v'·u and x = y·v'
                    let v_prefix = strip_suffix(v, u).ok_or(Unsat)?.to_string();
                    let longer = (y, v.to_string(), *b);
                    self.edges.remove(&longer);
                    self.add_edge(y, &v_prefix, x)?;
                    return Ok(true);
                }
            }
        }

        // every class now has at most one incoming edge; a cycle has a
        // nonempty label and cannot be satisfied
        let parent: BTreeMap<usize, usize> = edges.iter().map(|(a, _, b)| (*b, *a)).collect();
        for &start in parent.keys() {
            let mut seen = BTreeSet::new();
            let mut cur = start;
            while let Some(&p) = parent.get(&cur) {
                if !seen.insert(cur) {
                    return Err(Unsat);
                }
                cur = p;
            }
        }
        Ok(false)
    }

    fn saturate(&mut self) -> Result<(), Unsat> {
        while self.step()? {}
        self.canonical_edges()
    }

    /// Value terms for every class after saturation.
    fn terms(&mut self) -> Vec<Term> {
        let n = self.parent.len();
        let incoming: BTreeMap<usize, (usize, String)> = self
            .edges
            .iter()
            .map(|(a, w, b)| (*b, (*a, w.clone())))
            .collect();
        (0..n)
            .map(|x| {
                let mut cur = self.find(x);
                let mut suffix = String::new();
                while let Some((p, w)) = incoming.get(&cur) {
                    suffix = format!("{w}{suffix}");
                    cur = *p;
                }
                match &self.constant[cur] {
                    Some(c) => Term::Fixed(format!("{c}{suffix}")),
                    None => Term::Free(cur, suffix),
                }
            })
            .collect()
    }
}

struct Problem {
    features: Vec<Name>,
    index: BTreeMap<Name, usize>,
}

impl Problem {
    fn of(conj: &[PredicateAtom]) -> Self {
        let features: Vec<Name> = feature_set(conj).into_iter().collect();
        let index = features.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        Problem { features, index }
    }

    fn build(&self, conj: &[PredicateAtom]) -> Result<WordGraph, Unsat> {
        let mut g = WordGraph::new(self.features.len());
        for atom in conj {
            let Ok(p) = predicate(&atom.predicate) else {
                continue;
            };
            let x = self.index[&atom.features[0]];
            match p {
                StringPredicate::Top => {}
                StringPredicate::Eq(w) => {
                    g.set_constant(x, w.clone())?;
                }
                StringPredicate::Concat(w) => {
                    let y = self.index[&atom.features[1]];
                    g.add_edge(x, w, y)?;
                }
                StringPredicate::Same => {
                    let y = self.index[&atom.features[1]];
                    g.union(x, y)?;
                }
            }
        }
        g.saturate()?;
        Ok(g)
    }

    fn assignment(&self, terms: &[Term], roots: &BTreeMap<usize, String>) -> Assignment {
        self.features
            .iter()
            .zip(terms)
            .map(|(f, t)| {
                let s = match t {
                    Term::Fixed(s) => s.clone(),
                    Term::Free(r, s) => {
                        format!("{}{s}", roots.get(r).map(String::as_str).unwrap_or(""))
                    }
                };
                (*f, Value::String(s))
            })
            .collect()
    }
}

/// A letter occurring in none of the given words.
fn fresh_letter<'a>(words: impl IntoIterator<Item = &'a str>) -> char {
    let used: BTreeSet<char> = words.into_iter().flat_map(str::chars).collect();
    ('a'..='z')
        .chain('A'..='Z')
        .chain((0x100u32..).filter_map(char::from_u32))
        .find(|c| !used.contains(c))
        .expect("unbounded alphabet")
}

impl StringDomain {
    fn check(&self, atoms: &[&PredicateAtom]) -> Result<(), DomainError> {
        for a in atoms {
            let expected = predicate(&a.predicate)?.arity();
            if expected != a.features.len() {
                return Err(DomainError::ArityMismatch {
                    predicate: a.predicate.to_string(),
                    expected,
                    found: a.features.len(),
                });
            }
        }
        Ok(())
    }
}

impl ConcreteDomain for StringDomain {
    fn id(&self) -> DomainId {
        DomainId::String
    }

    fn arity(&self, p: &Predicate) -> Result<usize, DomainError> {
        Ok(predicate(p)?.arity())
    }

    fn apply(&self, p: &Predicate, values: &[Value]) -> Result<bool, DomainError> {
        let p = predicate(p)?;
        if values.len() != p.arity() {
            return Err(DomainError::ArityMismatch {
                predicate: format!("S.{p}"),
                expected: p.arity(),
                found: values.len(),
            });
        }
        let mut words = Vec::with_capacity(values.len());
        for v in values {
            match v {
                Value::String(s) => words.push(s.as_str()),
                other => {
                    return Err(DomainError::ForeignValue {
                        domain: DomainId::String,
                        value: other.to_string(),
                    })
                }
            }
        }
        Ok(match p {
            StringPredicate::Top => true,
            StringPredicate::Eq(w) => words[0] == w,
            StringPredicate::Concat(w) => {
                words[1].len() == words[0].len() + w.len()
                    && words[1].starts_with(words[0])
                    && words[1].ends_with(w.as_str())
            }
            StringPredicate::Same => words[0] == words[1],
        })
    }

    fn satisfiable(&self, conj: &[PredicateAtom]) -> Result<Satisfiability, DomainError> {
        self.check(&conj.iter().collect::<Vec<_>>())?;
        let problem = Problem::of(conj);
        Ok(match problem.build(conj) {
            Err(Unsat) => Satisfiability::Unsat,
            Ok(mut g) => {
                let terms = g.terms();
                Satisfiability::Sat(problem.assignment(&terms, &BTreeMap::new()))
            }
        })
    }

    fn refute(
        &self,
        conj: &[PredicateAtom],
        goal: &PredicateAtom,
    ) -> Result<Option<Assignment>, DomainError> {
        let mut all: Vec<&PredicateAtom> = conj.iter().collect();
        all.push(goal);
        self.check(&all)?;
        let problem = Problem::of(conj);
        let Ok(mut g) = problem.build(conj) else {
            return Ok(None);
        };
        let terms = g.terms();
        let base = problem.assignment(&terms, &BTreeMap::new());
        if goal.features.iter().any(|f| !problem.index.contains_key(f)) {
            return Ok(Some(base));
        }
        let term = |i: usize| &terms[problem.index[&goal.features[i]]];
        let implied = match predicate(&goal.predicate)? {
            StringPredicate::Top => true,
            StringPredicate::Eq(w) => *term(0) == Term::Fixed(w.clone()),
            StringPredicate::Concat(w) => *term(1) == term(0).append(w),
            StringPredicate::Same => term(0) == term(1),
        };
        if implied {
            return Ok(None);
        }

        // Perturb free roots until the goal breaks.
        let roots: Vec<usize> = terms
            .iter()
            .filter_map(|t| match t {
                Term::Free(r, _) => Some(*r),
                _ => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let words = conj
            .iter()
            .chain(std::iter::once(goal))
            .filter_map(|a| match &a.predicate {
                Predicate::String(p) => p.word(),
                _ => None,
            });
        let z = fresh_letter(words).to_string();
        let mut candidates: Vec<BTreeMap<usize, String>> = vec![BTreeMap::new()];
        for &r in &roots {
            candidates.push([(r, z.clone())].into_iter().collect());
        }
        candidates.push(
            roots
                .iter()
                .enumerate()
                .map(|(i, &r)| (r, z.repeat(i + 1)))
                .collect(),
        );
        for roots in candidates {
            let w = problem.assignment(&terms, &roots);
            if !goal.holds(&w) {
                debug_assert!(conj.iter().all(|a| a.holds(&w)));
                return Ok(Some(w));
            }
        }
        unreachable!("a non-implied goal always has a refuting root assignment")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::NameKind;

    fn f(i: u32) -> Name {
        Name::new(NameKind::Feature, i)
    }

    fn atom(p: StringPredicate, fs: &[u32]) -> PredicateAtom {
        PredicateAtom::new(Predicate::String(p), fs.iter().map(|&i| f(i)).collect())
    }

    fn eq(w: &str, x: u32) -> PredicateAtom {
        atom(StringPredicate::Eq(w.into()), &[x])
    }

    fn concat(w: &str, x: u32, y: u32) -> PredicateAtom {
        atom(StringPredicate::Concat(w.into()), &[x, y])
    }

    fn s(w: &str) -> Value {
        Value::String(w.into())
    }

    #[test]
    fn apply_concat() {
        let p = Predicate::String(StringPredicate::Concat("b".into()));
        assert!(StringDomain.apply(&p, &[s("ab"), s("abb")]).unwrap());
        assert!(!StringDomain.apply(&p, &[s("ab"), s("ab")]).unwrap());
        assert!(!StringDomain.apply(&p, &[s("a"), s("bb")]).unwrap());
    }

    #[test]
    fn arity_of_same() {
        assert_eq!(
            StringDomain
                .arity(&Predicate::String(StringPredicate::Same))
                .unwrap(),
            2
        );
    }

    #[test]
    fn propagates_constant_through_concat() {
        let conj = [eq("ab", 0), concat("b", 0, 1)];
        match StringDomain.satisfiable(&conj).unwrap() {
            Satisfiability::Sat(w) => {
                assert_eq!(w[&f(0)], s("ab"));
                assert_eq!(w[&f(1)], s("abb"));
            }
            Satisfiability::Unsat => panic!("expected sat"),
        }
        assert!(StringDomain.implies(&conj, &eq("abb", 1)).unwrap());
    }

    #[test]
    fn self_concat_is_unsat() {
        let conj = [concat("a", 0, 0)];
        assert_eq!(
            StringDomain.satisfiable(&conj).unwrap(),
            Satisfiability::Unsat
        );
    }

    #[test]
    fn suffix_clash_is_unsat() {
        // g = f·"a" = h·"b"
        let conj = [concat("a", 0, 2), concat("b", 1, 2)];
        assert_eq!(
            StringDomain.satisfiable(&conj).unwrap(),
            Satisfiability::Unsat
        );
    }

    #[test]
    fn suffix_rule_derives_edge() {
        // g = f·"ab" = h·"b"  ⇒  h = f·"a"
        let conj = [concat("ab", 0, 2), concat("b", 1, 2)];
        assert!(StringDomain.satisfiable(&conj).unwrap().is_sat());
        assert!(StringDomain.implies(&conj, &concat("a", 0, 1)).unwrap());
        assert!(!StringDomain.implies(&conj, &concat("b", 0, 1)).unwrap());
    }

    #[test]
    fn long_cycle_is_unsat() {
        let conj = [concat("a", 0, 1), concat("b", 1, 2), concat("c", 2, 0)];
        assert_eq!(
            StringDomain.satisfiable(&conj).unwrap(),
            Satisfiability::Unsat
        );
    }

    #[test]
    fn backward_strip_must_match() {
        let conj = [eq("ab", 1), concat("a", 0, 1)];
        assert_eq!(
            StringDomain.satisfiable(&conj).unwrap(),
            Satisfiability::Unsat
        );
    }

    #[test]
    fn equal_constants_imply_same() {
        let conj = [eq("a", 0), eq("a", 1)];
        assert!(StringDomain
            .implies(&conj, &atom(StringPredicate::Same, &[0, 1]))
            .unwrap());
        let free = [
            atom(StringPredicate::Top, &[0]),
            atom(StringPredicate::Top, &[1]),
        ];
        let w = StringDomain
            .refute(&free, &atom(StringPredicate::Same, &[0, 1]))
            .unwrap()
            .unwrap();
        assert_ne!(w[&f(0)], w[&f(1)]);
    }

    #[test]
    fn paths_with_equal_words_are_equal() {
        // x = r·"a"·"b", y = r·"ab"
        let conj = [concat("a", 0, 1), concat("b", 1, 2), concat("ab", 0, 3)];
        assert!(StringDomain
            .implies(&conj, &atom(StringPredicate::Same, &[2, 3]))
            .unwrap());
        assert!(!StringDomain.implies(&conj, &eq("ab", 3)).unwrap());
    }

    #[test]
    fn quoting_escapes() {
        assert_eq!(quote("a\"b\\"), "\"a\\\"b\\\\\"");
    }
}
