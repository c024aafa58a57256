use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;

use crate::cdomains::{DomainId, Predicate, RationalPredicate, StringPredicate, Value};
use crate::kb::{Concept, KnowledgeBase};

/// Finite value pools per concrete domain, used to assign features during
/// countermodel search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidatePools {
    pub rationals: Vec<BigRational>,
    pub strings: Vec<String>,
}

impl CandidatePools {
    pub fn values(&self, dom: DomainId) -> Vec<Value> {
        match dom {
            DomainId::Rational => self
                .rationals
                .iter()
                .cloned()
                .map(Value::Rational)
                .collect(),
            DomainId::String => self.strings.iter().cloned().map(Value::String).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rationals.is_empty() && self.strings.is_empty()
    }
}

/// Pools from the predicates mentioned in `kb` and `extra`.
///
/// Rationals: the constants, closed under one `plus` step, each shifted by
/// −1, −1/2, 0, 1/2 and 1. Strings: the constants, their suffixes, ε, each
/// constant followed by a letter that occurs in no constant, and each
/// constant followed by each `concat` word.
pub fn candidate_values(kb: &KnowledgeBase, extra: &[&Concept]) -> CandidatePools {
    let mut preds = Vec::new();
    let mut visit = |c: &Concept| {
        c.walk(&mut |d| {
            if let Concept::Pred(a) = d {
                preds.push(a.predicate.clone());
            }
        })
    };
    for (l, r) in kb.gcis() {
        visit(l);
        visit(r);
    }
    for c in extra {
        visit(c);
    }
    if preds.is_empty() {
        return CandidatePools::default();
    }

    let mut q_consts = BTreeSet::new();
    let mut q_plus = BTreeSet::new();
    let mut q_used = false;
    let mut words = BTreeSet::new();
    let mut concat = BTreeSet::new();
    let mut s_used = false;
    for p in &preds {
        match p {
            Predicate::Rational(rp) => {
                q_used = true;
                match rp {
                    RationalPredicate::Eq(q) | RationalPredicate::Gt(q) => {
                        q_consts.insert(q.clone());
                    }
                    RationalPredicate::Plus(q) => {
                        q_plus.insert(q.clone());
                    }
                    _ => {}
                }
            }
            Predicate::String(sp) => {
                s_used = true;
                match sp {
                    StringPredicate::Eq(w) => {
                        words.insert(w.clone());
                    }
                    StringPredicate::Concat(w) => {
                        concat.insert(w.clone());
                    }
                    _ => {}
                }
            }
        }
    }

    let mut pools = CandidatePools::default();
    if q_used {
        let mut base: BTreeSet<BigRational> = q_consts.clone();
        base.insert(BigRational::zero());
        for c in &q_consts {
            for q in &q_plus {
                base.insert(c + q);
            }
        }
        let half = BigRational::new(1.into(), 2.into());
        let one = BigRational::from_integer(1.into());
        let offsets = [-one.clone(), -half.clone(), BigRational::zero(), half, one];
        let mut out = BTreeSet::new();
        for b in &base {
            for o in &offsets {
                out.insert(b + o);
            }
        }
        pools.rationals = out.into_iter().collect();
    }
    if s_used {
        let fresh = (b'a'..=b'z')
            .map(char::from)
            .find(|ch| !words.iter().chain(&concat).any(|w| w.contains(*ch)))
            .unwrap_or('\u{e000}');
        let mut out = BTreeSet::new();
        out.insert(String::new());
        for w in &words {
            for (i, _) in w.char_indices() {
                out.insert(w[i..].to_string());
            }
            out.insert(w.clone());
            out.insert(format!("{w}{fresh}"));
            for c in &concat {
                out.insert(format!("{w}{c}"));
            }
        }
        for c in &concat {
            out.insert(c.clone());
        }
        out.insert(fresh.to_string());
        pools.strings = out.into_iter().collect();
    }
    pools
}
