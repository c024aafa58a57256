use crate::cdomains::PredicateAtom;

use super::Name;

/// An EL++ concept description.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Bottom,
    Atomic(Name),
    Nominal(Name),
    Conj(Box<Concept>, Box<Concept>),
    Exists(Name, Box<Concept>),
    Pred(PredicateAtom),
}

impl Concept {
    pub fn conj(left: Concept, right: Concept) -> Concept {
        Concept::Conj(Box::new(left), Box::new(right))
    }

    pub fn exists(role: Name, filler: Concept) -> Concept {
        Concept::Exists(role, Box::new(filler))
    }

    /// Left-associative conjunction of a nonempty list.
    pub fn conj_all(parts: impl IntoIterator<Item = Concept>) -> Option<Concept> {
        parts.into_iter().reduce(Concept::conj)
    }

    /// True for ⊤, concept names, nominals and predicate applications.
    pub fn is_basic(&self) -> bool {
        matches!(
            self,
            Concept::Top | Concept::Atomic(_) | Concept::Nominal(_) | Concept::Pred(_)
        )
    }

    pub fn depth(&self) -> usize {
        match self {
            Concept::Conj(l, r) => 1 + l.depth().max(r.depth()),
            Concept::Exists(_, f) => 1 + f.depth(),
            _ => 0,
        }
    }

    /// Pre-order traversal over this description and all its sub-descriptions.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Concept)) {
        visit(self);
        match self {
            Concept::Conj(l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            Concept::Exists(_, f) => f.walk(visit),
            _ => {}
        }
    }

    /// Every name occurring in the description, in pre-order.
    pub fn names(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.walk(&mut |c| match c {
            Concept::Atomic(n) | Concept::Nominal(n) => out.push(*n),
            Concept::Exists(r, _) => out.push(*r),
            Concept::Pred(atom) => out.extend(atom.features.iter().copied()),
            _ => {}
        });
        out
    }
}

/// Free function form of [`Concept::is_basic`].
pub fn is_basic(c: &Concept) -> bool {
    c.is_basic()
}

/// A general concept inclusion or a role inclusion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    Gci { lhs: Concept, rhs: Concept },
    RoleInclusion { chain: Vec<Name>, sup: Name },
}

impl Constraint {
    pub fn gci(lhs: Concept, rhs: Concept) -> Constraint {
        Constraint::Gci { lhs, rhs }
    }

    pub fn role_inclusion(chain: Vec<Name>, sup: Name) -> Constraint {
        Constraint::RoleInclusion { chain, sup }
    }

    pub fn names(&self) -> Vec<Name> {
        match self {
            Constraint::Gci { lhs, rhs } => {
                let mut v = lhs.names();
                v.extend(rhs.names());
                v
            }
            Constraint::RoleInclusion { chain, sup } => {
                let mut v = chain.clone();
                v.push(*sup);
                v
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::NameKind;

    fn atom(i: u32) -> Concept {
        Concept::Atomic(Name::new(NameKind::Concept, i))
    }

    #[test]
    fn basic_shapes() {
        assert!(atom(0).is_basic());
        assert!(Concept::Top.is_basic());
        assert!(Concept::Nominal(Name::new(NameKind::Individual, 0)).is_basic());
        assert!(!Concept::conj(atom(0), atom(1)).is_basic());
        assert!(!Concept::Bottom.is_basic());
        assert!(!Concept::exists(Name::new(NameKind::Role, 0), atom(0)).is_basic());
    }

    #[test]
    fn conj_all_is_left_associative() {
        let c = Concept::conj_all([atom(0), atom(1), atom(2)]).unwrap();
        assert_eq!(c, Concept::conj(Concept::conj(atom(0), atom(1)), atom(2)));
        assert!(Concept::conj_all(std::iter::empty()).is_none());
    }
}
