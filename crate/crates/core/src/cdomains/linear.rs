//! Exact satisfiability of linear equalities and strict inequalities over
//! the rationals: Gaussian elimination on the equalities, then
//! Fourier–Motzkin elimination on the strict inequalities. Witnesses are
//! rebuilt by back-substitution in reverse elimination order.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `Σ coeff·x + constant`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Linear {
    pub coeffs: BTreeMap<usize, BigRational>,
    pub constant: BigRational,
}

impl Linear {
    pub fn constant(c: BigRational) -> Self {
        Linear {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    /// `Σ terms + constant`, dropping zero coefficients.
    pub fn new(
        terms: impl IntoIterator<Item = (usize, BigRational)>,
        constant: BigRational,
    ) -> Self {
        let mut l = Linear::constant(constant);
        for (v, c) in terms {
            l.add_term(v, c);
        }
        l
    }

    fn add_term(&mut self, v: usize, c: BigRational) {
        let e = self.coeffs.entry(v).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    fn scaled(&self, k: &BigRational) -> Linear {
        Linear {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (*v, c * k))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            constant: &self.constant * k,
        }
    }

    fn plus(&self, other: &Linear) -> Linear {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_term(*v, c.clone());
        }
        out.constant += &other.constant;
        out
    }

    /// Replaces `v` by `expr` everywhere.
    fn substitute(&self, v: usize, expr: &Linear) -> Linear {
        match self.coeffs.get(&v) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(&v);
                rest.plus(&expr.scaled(c))
            }
        }
    }

    fn eval(&self, values: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .fold(self.constant.clone(), |acc, (v, c)| acc + c * &values[*v])
    }

    /// Scales so the leading coefficient has absolute value one, which
    /// makes duplicate constraints structurally equal.
    fn normalized(&self) -> Linear {
        match self.coeffs.values().next() {
            Some(c) => self.scaled(&(BigRational::one() / c.abs())),
            None => self.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Relation {
    /// expr = 0
    Zero,
    /// expr > 0
    Positive,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct LinearConstraint {
    pub expr: Linear,
    pub rel: Relation,
}

impl LinearConstraint {
    pub fn zero(expr: Linear) -> Self {
        LinearConstraint {
            expr,
            rel: Relation::Zero,
        }
    }

    pub fn positive(expr: Linear) -> Self {
        LinearConstraint {
            expr,
            rel: Relation::Positive,
        }
    }

    pub fn holds(&self, values: &[BigRational]) -> bool {
        let v = self.expr.eval(values);
        match self.rel {
            Relation::Zero => v.is_zero(),
            Relation::Positive => v.is_positive(),
        }
    }
}

enum Step {
    /// x = expr (expr free of x)
    Solved(usize, Linear),
    /// bounds of x at the moment it was eliminated
    Projected {
        var: usize,
        lower: Vec<Linear>,
        upper: Vec<Linear>,
    },
}

/// Returns a satisfying assignment for `num_vars` variables, or `None`.
pub(crate) fn solve(num_vars: usize, constraints: &[LinearConstraint]) -> Option<Vec<BigRational>> {
    let mut steps = Vec::new();
    let mut equalities: Vec<Linear> = Vec::new();
    let mut strict: BTreeSet<Linear> = BTreeSet::new();
    for c in constraints {
        match c.rel {
            Relation::Zero => equalities.push(c.expr.clone()),
            Relation::Positive => {
                strict.insert(c.expr.normalized());
            }
        }
    }

    // Gaussian elimination.
    while let Some(eq) = equalities.pop() {
        let Some((&v, c)) = eq.coeffs.iter().next() else {
            if !eq.constant.is_zero() {
                return None;
            }
            continue;
        };
        // c·v + rest = 0  ⇒  v = -rest / c
        let mut rest = eq.clone();
        rest.coeffs.remove(&v);
        let expr = rest.scaled(&(-BigRational::one() / c));
        for other in equalities.iter_mut() {
            *other = other.substitute(v, &expr);
        }
        strict = strict
            .iter()
            .map(|s| s.substitute(v, &expr).normalized())
            .collect();
        steps.push(Step::Solved(v, expr));
    }

    // Fourier–Motzkin on strict inequalities.
    loop {
        if strict
            .iter()
            .any(|s| s.coeffs.is_empty() && !s.constant.is_positive())
        {
            return None;
        }
        strict.retain(|s| !s.coeffs.is_empty());
        let Some(&var) = strict.iter().flat_map(|s| s.coeffs.keys()).min() else {
            break;
        };
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut next = BTreeSet::new();
        for s in &strict {
            match s.coeffs.get(&var) {
                None => {
                    next.insert(s.clone());
                }
                Some(c) => {
                    // c·x + rest > 0 ⇒ x > -rest/c (c > 0) or x < -rest/c (c < 0)
                    let mut rest = s.clone();
                    rest.coeffs.remove(&var);
                    let bound = rest.scaled(&(-BigRational::one() / c));
                    if c.is_positive() {
                        lower.push(bound);
                    } else {
                        upper.push(bound);
                    }
                }
            }
        }
        // lower < x < upper projects to upper - lower > 0
        for l in &lower {
            for u in &upper {
                next.insert(u.plus(&l.scaled(&-BigRational::one())).normalized());
            }
        }
        steps.push(Step::Projected { var, lower, upper });
        strict = next;
    }

    let mut values = vec![BigRational::zero(); num_vars];
    for step in steps.iter().rev() {
        match step {
            Step::Projected { var, lower, upper } => {
                let lo = lower.iter().map(|l| l.eval(&values)).max();
                let hi = upper.iter().map(|u| u.eval(&values)).min();
                let one = BigRational::one();
                values[*var] = match (lo, hi) {
                    (Some(lo), Some(hi)) => (lo + hi) / BigRational::from_integer(2.into()),
                    (Some(lo), None) => lo + one,
                    (None, Some(hi)) => hi - one,
                    (None, None) => BigRational::zero(),
                };
            }
            Step::Solved(v, expr) => values[*v] = expr.eval(&values),
        }
    }
    debug_assert!(constraints.iter().all(|c| c.holds(&values)));
    Some(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn lin(terms: &[(usize, i64)], c: i64) -> Linear {
        Linear::new(terms.iter().map(|&(v, k)| (v, q(k))), q(c))
    }

    #[test]
    fn equality_contradicts_strict_bound() {
        // x = 2, x > 3
        let cs = [
            LinearConstraint::zero(lin(&[(0, 1)], -2)),
            LinearConstraint::positive(lin(&[(0, 1)], -3)),
        ];
        assert_eq!(solve(1, &cs), None);
    }

    #[test]
    fn open_interval_gets_interior_witness() {
        // x > 1, 2 - x > 0
        let cs = [
            LinearConstraint::positive(lin(&[(0, 1)], -1)),
            LinearConstraint::positive(lin(&[(0, -1)], 2)),
        ];
        let w = solve(1, &cs).unwrap();
        assert!(cs.iter().all(|c| c.holds(&w)));
    }

    #[test]
    fn empty_open_interval_is_unsat() {
        // x > 1, 1 - x > 0
        let cs = [
            LinearConstraint::positive(lin(&[(0, 1)], -1)),
            LinearConstraint::positive(lin(&[(0, -1)], 1)),
        ];
        assert_eq!(solve(1, &cs), None);
    }

    #[test]
    fn chained_differences() {
        // y - x - 1 = 0, z - y - 1 = 0, x - z > 0  is unsat
        let cs = [
            LinearConstraint::zero(lin(&[(1, 1), (0, -1)], -1)),
            LinearConstraint::zero(lin(&[(2, 1), (1, -1)], -1)),
            LinearConstraint::positive(lin(&[(0, 1), (2, -1)], 0)),
        ];
        assert_eq!(solve(3, &cs), None);
        let sat = [
            LinearConstraint::zero(lin(&[(1, 1), (0, -1)], -1)),
            LinearConstraint::positive(lin(&[(1, 1)], -5)),
        ];
        let w = solve(2, &sat).unwrap();
        assert!(sat.iter().all(|c| c.holds(&w)));
    }

    #[test]
    fn inconsistent_equalities() {
        let cs = [
            LinearConstraint::zero(lin(&[(0, 1)], -1)),
            LinearConstraint::zero(lin(&[(0, 1)], -2)),
        ];
        assert_eq!(solve(1, &cs), None);
    }
}
