mod common;

use common::{sample_rational, satisfied, string_witness, witness_satisfies};
use elpp::cdomains::{
    apply_predicate, domain, DomainId, Predicate, PredicateAtom, RationalPredicate, Satisfiability,
    StringPredicate, Value,
};
use elpp::generate::{random_atom, random_conjunction};
use elpp::kb::{KnowledgeBase, Name};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn features(n: usize) -> Vec<Name> {
    let mut kb = KnowledgeBase::new();
    (0..n).map(|i| kb.feature(&format!("f{i}"))).collect()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rat(p: RationalPredicate, fs: &[Name]) -> PredicateAtom {
    PredicateAtom::new(Predicate::Rational(p), fs.to_vec())
}

fn st(p: StringPredicate, fs: &[Name]) -> PredicateAtom {
    PredicateAtom::new(Predicate::String(p), fs.to_vec())
}

#[test]
fn predicate_semantics() {
    let r = |v: BigRational| Value::Rational(v);
    let s = |w: &str| Value::String(w.into());
    let gt = Predicate::Rational(RationalPredicate::Gt(q(1, 2)));
    assert!(apply_predicate(&gt, &[r(q(1, 1))]).unwrap());
    assert!(!apply_predicate(&gt, &[r(q(1, 2))]).unwrap());
    let plus = Predicate::Rational(RationalPredicate::Plus(q(3, 2)));
    assert!(apply_predicate(&plus, &[r(q(1, 2)), r(q(2, 1))]).unwrap());
    let concat = Predicate::String(StringPredicate::Concat("ba".into()));
    assert!(apply_predicate(&concat, &[s("a"), s("aba")]).unwrap());
    assert!(!apply_predicate(&concat, &[s("aba"), s("a")]).unwrap());
    assert!(apply_predicate(&gt, &[s("a")]).is_err());
    assert!(apply_predicate(&concat, &[s("a")]).is_err());
}

#[test]
fn rational_chain_is_unsat() {
    let f = features(3);
    let conj = [
        rat(RationalPredicate::Eq(q(1, 1)), &f[..1]),
        rat(RationalPredicate::Plus(q(1, 2)), &f[..2]),
        rat(RationalPredicate::Plus(q(1, 2)), &f[1..3]),
        rat(RationalPredicate::Gt(q(2, 1)), &f[2..]),
    ];
    assert_eq!(
        domain(DomainId::Rational).satisfiable(&conj).unwrap(),
        Satisfiability::Unsat
    );
    let conj = [
        rat(RationalPredicate::Gt(q(0, 1)), &f[..1]),
        rat(RationalPredicate::Plus(q(-1, 1)), &f[..2]),
        rat(RationalPredicate::Gt(q(-1, 1)), &f[1..2]),
    ];
    let Satisfiability::Sat(w) = domain(DomainId::Rational).satisfiable(&conj).unwrap() else {
        panic!("expected sat")
    };
    witness_satisfies(&conj, &w).unwrap();
}

#[test]
fn string_concat_cycle() {
    let f = features(2);
    // f1 = f0·"a" and f0 = f1·"" cannot both hold.
    let conj = [
        st(StringPredicate::Concat("a".into()), &[f[0], f[1]]),
        st(StringPredicate::Concat(String::new()), &[f[1], f[0]]),
    ];
    assert_eq!(
        domain(DomainId::String).satisfiable(&conj).unwrap(),
        Satisfiability::Unsat
    );
    assert!(string_witness(&conj).is_none());
}

#[test]
fn implication_examples() {
    let f = features(2);
    let dom = domain(DomainId::Rational);
    let premise = [rat(RationalPredicate::Gt(q(2, 1)), &f[..1])];
    assert!(dom
        .implies(&premise, &rat(RationalPredicate::Gt(q(1, 1)), &f[..1]))
        .unwrap());
    assert!(!dom
        .implies(&premise, &rat(RationalPredicate::Gt(q(3, 1)), &f[..1]))
        .unwrap());
    let sdom = domain(DomainId::String);
    let premise = [
        st(StringPredicate::Eq("a".into()), &f[..1]),
        st(StringPredicate::Concat("b".into()), &f),
    ];
    assert!(sdom
        .implies(&premise, &st(StringPredicate::Eq("ab".into()), &f[1..]))
        .unwrap());
}

#[test]
fn foreign_predicates_are_rejected() {
    let f = features(1);
    let conj = [st(StringPredicate::Top, &f)];
    assert!(domain(DomainId::Rational).satisfiable(&conj).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn string_verdicts_match_enumeration(seed in any::<u64>(), nf in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conj = random_conjunction(&mut rng, true, &features(nf), 5);
        match domain(DomainId::String).satisfiable(&conj).unwrap() {
            Satisfiability::Sat(w) => prop_assert!(witness_satisfies(&conj, &w).is_ok()),
            Satisfiability::Unsat => prop_assert!(string_witness(&conj).is_none()),
        }
    }

    #[test]
    fn rational_verdicts_survive_sampling(seed in any::<u64>(), nf in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conj = random_conjunction(&mut rng, false, &features(nf), 5);
        match domain(DomainId::Rational).satisfiable(&conj).unwrap() {
            Satisfiability::Sat(w) => prop_assert!(witness_satisfies(&conj, &w).is_ok()),
            Satisfiability::Unsat => {
                for _ in 0..500 {
                    let s = sample_rational(&mut rng, &conj);
                    prop_assert!(!satisfied(&conj, &s), "witness {:?}", s);
                }
            }
        }
    }

    /// A refutation satisfies the premises and violates the goal; when none
    /// exists, independently found premise models satisfy the goal.
    #[test]
    fn refutations_are_genuine(seed in any::<u64>(), string in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fs = features(2);
        let conj = random_conjunction(&mut rng, string, &fs, 3);
        let goal = random_atom(&mut rng, string, &fs);
        let id = if string { DomainId::String } else { DomainId::Rational };
        match domain(id).refute(&conj, &goal).unwrap() {
            Some(w) => {
                prop_assert!(witness_satisfies(&conj, &w).is_ok());
                prop_assert!(!goal.holds(&w));
            }
            None if string => {
                if let Some(w) = string_witness(&conj) {
                    prop_assert!(goal.holds(&w), "counterexample {:?}", w);
                }
            }
            None => {
                for _ in 0..200 {
                    let s = sample_rational(&mut rng, &conj);
                    if satisfied(&conj, &s) {
                        prop_assert!(goal.holds(&s), "counterexample {:?}", s);
                    }
                }
            }
        }
    }

    /// Adding atoms can only remove models.
    #[test]
    fn satisfiability_is_antitone(seed in any::<u64>(), string in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fs = features(3);
        let conj = random_conjunction(&mut rng, string, &fs, 5);
        let id = if string { DomainId::String } else { DomainId::Rational };
        let dom = domain(id);
        for k in 1..conj.len() {
            if !dom.satisfiable(&conj[..k]).unwrap().is_sat() {
                prop_assert!(!dom.satisfiable(&conj).unwrap().is_sat());
            }
        }
    }
}
