//! Shared test helpers: brute-force checkers for concrete-domain verdicts,
//! independent of the deciders under test, and a parser input fuzzer.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use elpp::cdomains::{
    apply_predicate, Assignment, Predicate, PredicateAtom, RationalPredicate, StringPredicate,
    Value,
};
use elpp::kb::Name;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn features_of(conj: &[PredicateAtom]) -> Vec<Name> {
    let set: BTreeSet<Name> = conj
        .iter()
        .flat_map(|a| a.features.iter().copied())
        .collect();
    set.into_iter().collect()
}

/// Checks every atom on the witness with `apply_predicate`.
pub fn witness_satisfies(conj: &[PredicateAtom], w: &Assignment) -> Result<(), String> {
    for atom in conj {
        let values: Option<Vec<Value>> = atom.features.iter().map(|f| w.get(f).cloned()).collect();
        let Some(values) = values else {
            return Err(format!(
                "witness leaves a feature of {} undefined",
                atom.predicate
            ));
        };
        match apply_predicate(&atom.predicate, &values) {
            Ok(true) => {}
            Ok(false) => return Err(format!("{} fails on {values:?}", atom.predicate)),
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(())
}

fn string_constants(conj: &[PredicateAtom]) -> Vec<&str> {
    conj.iter()
        .filter_map(|a| match &a.predicate {
            Predicate::String(StringPredicate::Eq(w) | StringPredicate::Concat(w)) => {
                Some(w.as_str())
            }
            _ => None,
        })
        .collect()
}

/// Every word of length ≤ max-constant-length + 2 over the constants'
/// letters plus one letter foreign to them.
pub fn bounded_words(conj: &[PredicateAtom]) -> Vec<String> {
    let consts = string_constants(conj);
    let mut alphabet: BTreeSet<char> = consts.iter().flat_map(|w| w.chars()).collect();
    let fresh = ('a'..='z').find(|c| !alphabet.contains(c)).unwrap();
    alphabet.insert(fresh);
    let max_len = consts.iter().map(|w| w.chars().count()).max().unwrap_or(0) + 2;
    let mut words = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |c| format!("{w}{c}")))
            .collect();
        words.extend(layer.iter().cloned());
    }
    words
}

/// Exhaustive search for a string witness over `bounded_words`. Unary atoms
/// filter each feature's candidates first. Features linked by binary atoms
/// form components that are searched separately, each in an order where
/// every feature after the first touches an earlier one, so binary atoms
/// prune as soon as possible.
pub fn string_witness(conj: &[PredicateAtom]) -> Option<Assignment> {
    let words = bounded_words(conj);
    let feats = features_of(conj);
    let mut cands: BTreeMap<Name, Vec<Value>> = BTreeMap::new();
    for &f in &feats {
        let vals = words
            .iter()
            .map(|w| Value::String(w.clone()))
            .filter(|v| {
                conj.iter()
                    .filter(|a| a.features.iter().all(|&g| g == f))
                    .all(|a| {
                        let vs = vec![v.clone(); a.features.len()];
                        apply_predicate(&a.predicate, &vs).unwrap()
                    })
            })
            .collect();
        cands.insert(f, vals);
    }
    let mut assignment = Assignment::new();
    let mut seen = BTreeSet::new();
    for &root in &feats {
        if !seen.insert(root) {
            continue;
        }
        let mut order = vec![root];
        let mut k = 0;
        while k < order.len() {
            let f = order[k];
            for a in conj.iter().filter(|a| a.features.contains(&f)) {
                for &g in &a.features {
                    if seen.insert(g) {
                        order.push(g);
                    }
                }
            }
            k += 1;
        }
        if !backtrack(conj, &order, &cands, &mut assignment) {
            return None;
        }
    }
    Some(assignment)
}

fn backtrack(
    conj: &[PredicateAtom],
    feats: &[Name],
    cands: &BTreeMap<Name, Vec<Value>>,
    assignment: &mut Assignment,
) -> bool {
    let Some((&f, rest)) = feats.split_first() else {
        return true;
    };
    for v in &cands[&f] {
        assignment.insert(f, v.clone());
        let ok = conj.iter().filter(|a| a.features.contains(&f)).all(|a| {
            let vs: Option<Vec<Value>> = a
                .features
                .iter()
                .map(|g| assignment.get(g).cloned())
                .collect();
            vs.is_none_or(|vs| apply_predicate(&a.predicate, &vs).unwrap())
        });
        if ok && backtrack(conj, rest, cands, assignment) {
            return true;
        }
    }
    assignment.remove(&f);
    false
}

fn rational_constants(conj: &[PredicateAtom]) -> Vec<BigRational> {
    conj.iter()
        .filter_map(|a| match &a.predicate {
            Predicate::Rational(
                RationalPredicate::Eq(q) | RationalPredicate::Gt(q) | RationalPredicate::Plus(q),
            ) => Some(q.clone()),
            _ => None,
        })
        .collect()
}

fn random_rational<R: Rng>(rng: &mut R, consts: &[BigRational]) -> BigRational {
    let small = BigRational::new(rng.gen_range(-40..=40).into(), rng.gen_range(1..=8).into());
    match (consts.choose(rng), rng.gen_range(0..3)) {
        (Some(c), 0) => c.clone(),
        (Some(c), 1) => c + small,
        _ => small,
    }
}

/// One sampled assignment. Features are visited in random order; a binary
/// atom linking to an already-sampled feature usually dictates the value, so
/// satisfying assignments of chained atoms are hit with fair probability.
pub fn sample_rational<R: Rng>(rng: &mut R, conj: &[PredicateAtom]) -> Assignment {
    let consts = rational_constants(conj);
    let mut feats = features_of(conj);
    feats.shuffle(rng);
    let mut out = Assignment::new();
    for f in feats {
        let mut forced = Vec::new();
        for a in conj {
            let [x, y] = a.features[..] else { continue };
            let q = match &a.predicate {
                Predicate::Rational(RationalPredicate::Plus(q)) => q.clone(),
                Predicate::Rational(RationalPredicate::Same) => BigRational::from_integer(0.into()),
                _ => continue,
            };
            // x + q = y
            match (out.get(&x), out.get(&y)) {
                (Some(Value::Rational(vx)), None) if y == f => forced.push(vx + &q),
                (None, Some(Value::Rational(vy))) if x == f => forced.push(vy - &q),
                _ => {}
            }
        }
        let v = match forced.choose(rng) {
            Some(v) if rng.gen_bool(0.85) => v.clone(),
            _ => random_rational(rng, &consts),
        };
        out.insert(f, Value::Rational(v));
    }
    out
}

pub fn satisfied(conj: &[PredicateAtom], w: &Assignment) -> bool {
    witness_satisfies(conj, w).is_ok()
}

const TOKENS: &[&str] = &[
    "concept",
    "role",
    "individual",
    "feature",
    "axiom",
    "exists",
    "and",
    "top",
    "bot",
    "<=",
    " o ",
    "(",
    ")",
    "{",
    "}",
    ".",
    ",",
    "[",
    "]",
    "Q.",
    "S.",
    "eq",
    "gt",
    "plus",
    "same",
    "concat",
    "\"",
    "\"ab\"",
    "1/2",
    "-3",
    "0",
    "A",
    "r",
    "a",
    "f",
    "\n",
    " ",
    "#",
    "é",
    "\\",
    "\u{0}",
    "99999999999999999999999999",
    "1/0",
];

/// A fuzzed parser input: either a mutation of `seed_text` or a random
/// token soup.
pub fn fuzz_input<R: Rng>(rng: &mut R, seed_text: &str) -> String {
    if rng.gen_bool(0.3) {
        let n = rng.gen_range(0..40);
        return (0..n).map(|_| *TOKENS.choose(rng).unwrap()).collect();
    }
    let mut chars: Vec<char> = seed_text.chars().collect();
    for _ in 0..rng.gen_range(1..=4) {
        let at = rng.gen_range(0..=chars.len());
        match rng.gen_range(0..4) {
            0 if at < chars.len() => {
                chars.remove(at);
            }
            1 => {
                let tok = TOKENS.choose(rng).unwrap();
                for (k, c) in tok.chars().enumerate() {
                    chars.insert(at + k, c);
                }
            }
            2 if at < chars.len() => {
                let end = (at + rng.gen_range(1..12)).min(chars.len());
                chars.drain(at..end);
            }
            _ => {
                let c = char::from_u32(rng.gen_range(0..0x250)).unwrap_or('?');
                chars.insert(at, c);
            }
        }
    }
    chars.into_iter().collect()
}
