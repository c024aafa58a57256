//! Seeded random knowledge bases, queries and predicate conjunctions.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cdomains::{Predicate, PredicateAtom, RationalPredicate, StringPredicate};
use crate::kb::{Concept, Constraint, KnowledgeBase, Name};

/// Shape limits for random knowledge bases.
#[derive(Clone, Debug, PartialEq)]
pub struct KbShape {
    pub max_concepts: usize,
    pub max_roles: usize,
    pub max_individuals: usize,
    pub max_features: usize,
    pub max_gcis: usize,
    pub max_role_inclusions: usize,
    pub max_chain: usize,
    pub max_depth: usize,
    /// Probability that a basic position holds a predicate atom.
    pub predicate_rate: f64,
    /// Probability that a right-hand side is ⊥.
    pub bottom_rate: f64,
}

impl KbShape {
    /// Small kbs without concrete domains.
    pub fn abstract_small() -> Self {
        KbShape {
            max_concepts: 5,
            max_roles: 2,
            max_individuals: 2,
            max_features: 0,
            max_gcis: 8,
            max_role_inclusions: 2,
            max_chain: 3,
            max_depth: 2,
            predicate_rate: 0.0,
            bottom_rate: 0.05,
        }
    }

    /// Small kbs mixing in both concrete domains.
    pub fn concrete_small() -> Self {
        KbShape {
            max_features: 2,
            predicate_rate: 0.3,
            ..Self::abstract_small()
        }
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

struct Vocab {
    concepts: Vec<Name>,
    roles: Vec<Name>,
    individuals: Vec<Name>,
    features: Vec<Name>,
}

fn declare<R: Rng>(kb: &mut KnowledgeBase, rng: &mut R, shape: &KbShape) -> Vocab {
    let mut pick = |lo: usize, hi: usize| if hi <= lo { hi } else { rng.gen_range(lo..=hi) };
    let nc = pick(1, shape.max_concepts);
    let nr = pick(1, shape.max_roles);
    let ni = pick(0, shape.max_individuals);
    let nf = pick(
        if shape.max_features > 0 { 1 } else { 0 },
        shape.max_features,
    );
    let mut names = |kind, prefix: &str, n| -> Vec<Name> {
        labels(prefix, n)
            .iter()
            .map(|l| kb.declare(kind, l))
            .collect()
    };
    use crate::kb::NameKind::*;
    Vocab {
        concepts: names(Concept, "C", nc),
        roles: names(Role, "r", nr),
        individuals: names(Individual, "i", ni),
        features: names(Feature, "f", nf),
    }
}

const RATIONAL_GRID: [(i64, i64); 6] = [(0, 1), (1, 1), (2, 1), (3, 1), (-1, 1), (1, 2)];
const WORD_GRID: [&str; 5] = ["", "a", "b", "ab", "ba"];

fn grid_rational<R: Rng>(rng: &mut R) -> BigRational {
    let (n, d) = *RATIONAL_GRID.choose(rng).unwrap();
    BigRational::new(n.into(), d.into())
}

fn grid_word<R: Rng>(rng: &mut R) -> String {
    WORD_GRID.choose(rng).unwrap().to_string()
}

/// A random predicate atom over `features`.
pub fn random_atom<R: Rng>(rng: &mut R, string: bool, features: &[Name]) -> PredicateAtom {
    let f = *features.choose(rng).expect("features are nonempty");
    let g = *features.choose(rng).unwrap();
    if string {
        match rng.gen_range(0..4) {
            0 => PredicateAtom::new(Predicate::String(StringPredicate::Top), vec![f]),
            1 => PredicateAtom::new(
                Predicate::String(StringPredicate::Eq(grid_word(rng))),
                vec![f],
            ),
            2 => PredicateAtom::new(
                Predicate::String(StringPredicate::Concat(grid_word(rng))),
                vec![f, g],
            ),
            _ => PredicateAtom::new(Predicate::String(StringPredicate::Same), vec![f, g]),
        }
    } else {
        match rng.gen_range(0..5) {
            0 => PredicateAtom::new(Predicate::Rational(RationalPredicate::Top), vec![f]),
            1 => PredicateAtom::new(
                Predicate::Rational(RationalPredicate::Eq(grid_rational(rng))),
                vec![f],
            ),
            2 => PredicateAtom::new(
                Predicate::Rational(RationalPredicate::Gt(grid_rational(rng))),
                vec![f],
            ),
            3 => PredicateAtom::new(
                Predicate::Rational(RationalPredicate::Plus(grid_rational(rng))),
                vec![f, g],
            ),
            _ => PredicateAtom::new(Predicate::Rational(RationalPredicate::Same), vec![f, g]),
        }
    }
}

fn basic<R: Rng>(rng: &mut R, v: &Vocab, shape: &KbShape) -> Concept {
    if !v.features.is_empty() && rng.gen_bool(shape.predicate_rate) {
        let string = rng.gen_bool(0.5);
        return Concept::Pred(random_atom(rng, string, &v.features));
    }
    let roll = rng.gen_range(0..10);
    if roll == 0 {
        Concept::Top
    } else if roll <= 2 && !v.individuals.is_empty() {
        Concept::Nominal(*v.individuals.choose(rng).unwrap())
    } else {
        Concept::Atomic(*v.concepts.choose(rng).unwrap())
    }
}

fn concept<R: Rng>(rng: &mut R, v: &Vocab, shape: &KbShape, depth: usize) -> Concept {
    if depth == 0 || rng.gen_bool(0.45) {
        return basic(rng, v, shape);
    }
    if rng.gen_bool(0.5) {
        Concept::conj(
            concept(rng, v, shape, depth - 1),
            concept(rng, v, shape, depth - 1),
        )
    } else {
        Concept::exists(
            *v.roles.choose(rng).unwrap(),
            concept(rng, v, shape, depth - 1),
        )
    }
}

/// A random valid knowledge base of the given shape.
pub fn random_kb<R: Rng>(rng: &mut R, shape: &KbShape) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    let v = declare(&mut kb, rng, shape);
    let ngci = rng.gen_range(1..=shape.max_gcis.max(1));
    for _ in 0..ngci {
        let lhs = concept(rng, &v, shape, shape.max_depth);
        let rhs = if rng.gen_bool(shape.bottom_rate) {
            Concept::Bottom
        } else {
            concept(rng, &v, shape, shape.max_depth)
        };
        kb.add_gci(lhs, rhs);
    }
    let nri = rng.gen_range(0..=shape.max_role_inclusions);
    for _ in 0..nri {
        let len = rng.gen_range(1..=shape.max_chain.max(1));
        let chain = (0..len).map(|_| *v.roles.choose(rng).unwrap()).collect();
        kb.add(Constraint::role_inclusion(
            chain,
            *v.roles.choose(rng).unwrap(),
        ));
    }
    debug_assert_eq!(kb.validate(), Ok(()));
    kb
}

/// Two declared concept names, possibly equal.
pub fn random_name_pair<R: Rng>(rng: &mut R, kb: &KnowledgeBase) -> (Concept, Concept) {
    let names: Vec<Name> = kb.concepts().iter().copied().collect();
    (
        Concept::Atomic(*names.choose(rng).expect("kb declares a concept")),
        Concept::Atomic(*names.choose(rng).unwrap()),
    )
}

/// A random description over `kb`'s declared names.
pub fn random_concept<R: Rng>(rng: &mut R, kb: &KnowledgeBase, max_depth: usize) -> Concept {
    let v = Vocab {
        concepts: kb.concepts().iter().copied().collect(),
        roles: kb.roles().iter().copied().collect(),
        individuals: kb.individuals().iter().copied().collect(),
        features: Vec::new(),
    };
    let shape = KbShape {
        max_depth,
        ..KbShape::abstract_small()
    };
    if v.roles.is_empty() || v.concepts.is_empty() {
        return Concept::Top;
    }
    concept(rng, &v, &shape, max_depth)
}

/// The benchmark shape: 20 concept names, 10 roles, 20 individuals and 40
/// axioms mixing names, nominals, conjunctions, existentials and role
/// inclusions.
pub fn benchmark_kb<R: Rng>(rng: &mut R) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    use crate::kb::NameKind::*;
    let v = Vocab {
        concepts: labels("C", 20)
            .iter()
            .map(|l| kb.declare(Concept, l))
            .collect(),
        roles: labels("r", 10)
            .iter()
            .map(|l| kb.declare(Role, l))
            .collect(),
        individuals: labels("i", 20)
            .iter()
            .map(|l| kb.declare(Individual, l))
            .collect(),
        features: Vec::new(),
    };
    let shape = KbShape {
        bottom_rate: 0.0,
        ..KbShape::abstract_small()
    };
    for k in 0..40 {
        if k % 8 == 7 {
            let len = rng.gen_range(1..=2);
            let chain = (0..len).map(|_| *v.roles.choose(rng).unwrap()).collect();
            kb.add(Constraint::role_inclusion(
                chain,
                *v.roles.choose(rng).unwrap(),
            ));
        } else {
            let lhs = concept(rng, &v, &shape, 2);
            let rhs = concept(rng, &v, &shape, 2);
            kb.add_gci(lhs, rhs);
        }
    }
    kb
}

/// A random conjunction of atoms of one domain over `features`.
pub fn random_conjunction<R: Rng>(
    rng: &mut R,
    string: bool,
    features: &[Name],
    max_atoms: usize,
) -> Vec<PredicateAtom> {
    let n = rng.gen_range(1..=max_atoms.max(1));
    (0..n).map(|_| random_atom(rng, string, features)).collect()
}
