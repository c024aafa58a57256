use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::linear::{solve, Linear, LinearConstraint};
use super::{
    feature_set, foreign, Assignment, ConcreteDomain, DomainError, DomainId, Predicate,
    PredicateAtom, Satisfiability, Value,
};
use crate::kb::Name;

/// Predicates of the rational domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RationalPredicate {
    /// v ∈ ℚ
    Top,
    /// v = q
    Eq(BigRational),
    /// v > q
    Gt(BigRational),
    /// v1 + q = v2
    Plus(BigRational),
    /// v1 = v2
    Same,
}

impl RationalPredicate {
    pub fn arity(&self) -> usize {
        match self {
            RationalPredicate::Top | RationalPredicate::Eq(_) | RationalPredicate::Gt(_) => 1,
            RationalPredicate::Plus(_) | RationalPredicate::Same => 2,
        }
    }

    pub fn constant(&self) -> Option<&BigRational> {
        match self {
            RationalPredicate::Eq(q) | RationalPredicate::Gt(q) | RationalPredicate::Plus(q) => {
                Some(q)
            }
            _ => None,
        }
    }
}

impl fmt::Display for RationalPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalPredicate::Top => f.write_str("top"),
            RationalPredicate::Eq(q) => write!(f, "eq[{q}]"),
            RationalPredicate::Gt(q) => write!(f, "gt[{q}]"),
            RationalPredicate::Plus(q) => write!(f, "plus[{q}]"),
            RationalPredicate::Same => f.write_str("same"),
        }
    }
}

/// The domain ℚ with exact arithmetic.
#[derive(Clone, Copy, Debug, Default)]
pub struct RationalDomain;

fn predicate(p: &Predicate) -> Result<&RationalPredicate, DomainError> {
    match p {
        Predicate::Rational(r) => Ok(r),
        other => Err(foreign(DomainId::Rational, other)),
    }
}

/// Variable numbering for the features of one decision problem.
struct Vars(BTreeMap<Name, usize>);

impl Vars {
    fn of(conj: &[PredicateAtom]) -> Self {
        Vars(
            feature_set(conj)
                .into_iter()
                .enumerate()
                .map(|(i, f)| (f, i))
                .collect(),
        )
    }

    fn var(&self, f: &Name) -> usize {
        self.0[f]
    }

    fn len(&self) -> usize {
        self.0.len()
    }

    fn assignment(&self, values: &[BigRational]) -> Assignment {
        self.0
            .iter()
            .map(|(f, &i)| (*f, Value::Rational(values[i].clone())))
            .collect()
    }
}

fn minus_one() -> BigRational {
    -BigRational::one()
}

/// `a·x + b·y + c`
fn expr(terms: &[(usize, BigRational)], c: BigRational) -> Linear {
    Linear::new(terms.iter().cloned(), c)
}

/// The linear constraint(s) an atom imposes. `Top` imposes none.
fn encode(atom: &PredicateAtom, vars: &Vars) -> Option<LinearConstraint> {
    let p = predicate(&atom.predicate).ok()?;
    let one = BigRational::one;
    let x = vars.var(&atom.features[0]);
    Some(match p {
        RationalPredicate::Top => return None,
        RationalPredicate::Eq(q) => LinearConstraint::zero(expr(&[(x, one())], -q.clone())),
        RationalPredicate::Gt(q) => LinearConstraint::positive(expr(&[(x, one())], -q.clone())),
        RationalPredicate::Plus(q) => {
            let y = vars.var(&atom.features[1]);
            LinearConstraint::zero(expr(&[(x, one()), (y, minus_one())], q.clone()))
        }
        RationalPredicate::Same => {
            let y = vars.var(&atom.features[1]);
            LinearConstraint::zero(expr(&[(x, one()), (y, minus_one())], BigRational::zero()))
        }
    })
}

/// The disjuncts of the negation of a goal, each a strict inequality.
fn negation(goal: &PredicateAtom, vars: &Vars) -> Vec<LinearConstraint> {
    let Ok(p) = predicate(&goal.predicate) else {
        return Vec::new();
    };
    let one = BigRational::one;
    let x = vars.var(&goal.features[0]);
    match p {
        RationalPredicate::Top => Vec::new(),
        // v > q ∨ v < q
        RationalPredicate::Eq(q) => vec![
            LinearConstraint::positive(expr(&[(x, one())], -q.clone())),
            LinearConstraint::positive(expr(&[(x, minus_one())], q.clone())),
        ],
        // v = q ∨ v < q
        RationalPredicate::Gt(q) => vec![
            LinearConstraint::zero(expr(&[(x, one())], -q.clone())),
            LinearConstraint::positive(expr(&[(x, minus_one())], q.clone())),
        ],
        // v1 + q > v2 ∨ v1 + q < v2
        RationalPredicate::Plus(q) => {
            let y = vars.var(&goal.features[1]);
            vec![
                LinearConstraint::positive(expr(&[(x, one()), (y, minus_one())], q.clone())),
                LinearConstraint::positive(expr(&[(y, one()), (x, minus_one())], -q.clone())),
            ]
        }
        // v1 > v2 ∨ v1 < v2
        RationalPredicate::Same => {
            let y = vars.var(&goal.features[1]);
            vec![
                LinearConstraint::positive(expr(
                    &[(x, one()), (y, minus_one())],
                    BigRational::zero(),
                )),
                LinearConstraint::positive(expr(
                    &[(y, one()), (x, minus_one())],
                    BigRational::zero(),
                )),
            ]
        }
    }
}

impl RationalDomain {
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

    fn solve_with(
        &self,
        conj: &[PredicateAtom],
        vars: &Vars,
        extra: Option<LinearConstraint>,
    ) -> Option<Assignment> {
        let mut cs: Vec<LinearConstraint> = conj.iter().filter_map(|a| encode(a, vars)).collect();
        cs.extend(extra);
        solve(vars.len(), &cs).map(|v| vars.assignment(&v))
    }
}

impl ConcreteDomain for RationalDomain {
    fn id(&self) -> DomainId {
        DomainId::Rational
    }

    fn arity(&self, p: &Predicate) -> Result<usize, DomainError> {
        Ok(predicate(p)?.arity())
    }

    fn apply(&self, p: &Predicate, values: &[Value]) -> Result<bool, DomainError> {
        let p = predicate(p)?;
        if values.len() != p.arity() {
            return Err(DomainError::ArityMismatch {
                predicate: format!("Q.{p}"),
                expected: p.arity(),
                found: values.len(),
            });
        }
        let mut nums = Vec::with_capacity(values.len());
        for v in values {
            match v {
                Value::Rational(q) => nums.push(q),
                other => {
                    return Err(DomainError::ForeignValue {
                        domain: DomainId::Rational,
                        value: other.to_string(),
                    })
                }
            }
        }
        Ok(match p {
            RationalPredicate::Top => true,
            RationalPredicate::Eq(q) => nums[0] == q,
            RationalPredicate::Gt(q) => nums[0] > q,
            RationalPredicate::Plus(q) => &(nums[0] + q) == nums[1],
            RationalPredicate::Same => nums[0] == nums[1],
        })
    }

    fn satisfiable(&self, conj: &[PredicateAtom]) -> Result<Satisfiability, DomainError> {
        self.check(&conj.iter().collect::<Vec<_>>())?;
        let vars = Vars::of(conj);
        Ok(match self.solve_with(conj, &vars, None) {
            Some(w) => Satisfiability::Sat(w),
            None => Satisfiability::Unsat,
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
        let vars = Vars::of(conj);
        let Some(base) = self.solve_with(conj, &vars, None) else {
            return Ok(None);
        };
        // A goal feature the premise does not mention may stay undefined.
        if goal.features.iter().any(|f| !vars.0.contains_key(f)) {
            return Ok(Some(base));
        }
        for disjunct in negation(goal, &vars) {
            if let Some(w) = self.solve_with(conj, &vars, Some(disjunct)) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::NameKind;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn int(n: i64) -> BigRational {
        q(n, 1)
    }

    fn f(i: u32) -> Name {
        Name::new(NameKind::Feature, i)
    }

    fn atom(p: RationalPredicate, fs: &[u32]) -> PredicateAtom {
        PredicateAtom::new(Predicate::Rational(p), fs.iter().map(|&i| f(i)).collect())
    }

    fn apply(p: RationalPredicate, vs: &[BigRational]) -> bool {
        let vs: Vec<Value> = vs.iter().cloned().map(Value::Rational).collect();
        RationalDomain.apply(&Predicate::Rational(p), &vs).unwrap()
    }

    #[test]
    fn apply_cases() {
        assert!(apply(RationalPredicate::Eq(int(2)), &[int(2)]));
        assert!(!apply(RationalPredicate::Gt(int(2)), &[q(3, 2)]));
        assert!(apply(RationalPredicate::Plus(q(1, 2)), &[int(1), q(3, 2)]));
        assert!(apply(RationalPredicate::Same, &[q(2, 4), q(1, 2)]));
    }

    #[test]
    fn apply_rejects_foreign_input() {
        let err = RationalDomain
            .apply(
                &Predicate::Rational(RationalPredicate::Top),
                &[Value::String("a".into())],
            )
            .unwrap_err();
        assert!(matches!(err, DomainError::ForeignValue { .. }));
        let err = RationalDomain
            .apply(
                &Predicate::Rational(RationalPredicate::Same),
                &[Value::Rational(int(1))],
            )
            .unwrap_err();
        assert!(matches!(err, DomainError::ArityMismatch { .. }));
        let err = RationalDomain
            .arity(&Predicate::String(crate::cdomains::StringPredicate::Same))
            .unwrap_err();
        assert!(matches!(err, DomainError::ForeignPredicate { .. }));
    }

    #[test]
    fn arities() {
        let ar = |p| RationalDomain.arity(&Predicate::Rational(p)).unwrap();
        assert_eq!(ar(RationalPredicate::Plus(int(1))), 2);
        assert_eq!(ar(RationalPredicate::Eq(int(2))), 1);
        assert_eq!(ar(RationalPredicate::Top), 1);
    }

    #[test]
    fn empty_conjunction_is_sat() {
        assert_eq!(
            RationalDomain.satisfiable(&[]).unwrap(),
            Satisfiability::Sat(Assignment::new())
        );
    }

    #[test]
    fn eq_and_gt_clash() {
        let conj = [
            atom(RationalPredicate::Eq(int(2)), &[0]),
            atom(RationalPredicate::Gt(int(3)), &[0]),
        ];
        assert_eq!(
            RationalDomain.satisfiable(&conj).unwrap(),
            Satisfiability::Unsat
        );
    }

    #[test]
    fn implication_cases() {
        let gt2 = [atom(RationalPredicate::Gt(int(2)), &[0])];
        assert!(RationalDomain
            .implies(&gt2, &atom(RationalPredicate::Gt(int(1)), &[0]))
            .unwrap());
        assert!(!RationalDomain
            .implies(&gt2, &atom(RationalPredicate::Gt(int(3)), &[0]))
            .unwrap());
        let top = [atom(RationalPredicate::Top, &[0])];
        assert!(!RationalDomain
            .implies(&top, &atom(RationalPredicate::Eq(int(2)), &[0]))
            .unwrap());
        let clash = [
            atom(RationalPredicate::Eq(int(2)), &[0]),
            atom(RationalPredicate::Gt(int(3)), &[0]),
        ];
        assert!(RationalDomain
            .implies(&clash, &atom(RationalPredicate::Eq(int(5)), &[1]))
            .unwrap());
    }

    #[test]
    fn implication_through_plus() {
        // f = 1, f + 1/2 = g  ⊨  g = 3/2 and g > 1
        let conj = [
            atom(RationalPredicate::Eq(int(1)), &[0]),
            atom(RationalPredicate::Plus(q(1, 2)), &[0, 1]),
        ];
        assert!(RationalDomain
            .implies(&conj, &atom(RationalPredicate::Eq(q(3, 2)), &[1]))
            .unwrap());
        assert!(RationalDomain
            .implies(&conj, &atom(RationalPredicate::Gt(int(1)), &[1]))
            .unwrap());
        assert!(RationalDomain
            .implies(&conj, &atom(RationalPredicate::Top, &[1]))
            .unwrap());
        // the goal mentions a feature the premise leaves free
        assert!(!RationalDomain
            .implies(&conj, &atom(RationalPredicate::Top, &[2]))
            .unwrap());
    }

    #[test]
    fn refutation_witness_violates_goal() {
        let conj = [atom(RationalPredicate::Gt(int(0)), &[0])];
        let goal = atom(RationalPredicate::Gt(int(5)), &[0]);
        let w = RationalDomain.refute(&conj, &goal).unwrap().unwrap();
        assert!(conj.iter().all(|a| a.holds(&w)));
        assert!(!goal.holds(&w));
    }
}
