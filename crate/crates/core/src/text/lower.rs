use super::parser::{AxiomExpr, ConceptExpr, Ident, SourceOntology, Statement};
use super::TextError;
use crate::cdomains::{self, PredicateAtom};
use crate::kb::{Concept, Constraint, KnowledgeBase, Name, NameKind};

impl SourceOntology {
    /// Resolves names against the declarations (which may appear anywhere in
    /// the file) and builds the knowledge base. Every error cites a span.
    pub fn lower(&self) -> Result<KnowledgeBase, Vec<TextError>> {
        let mut kb = KnowledgeBase::new();
        for st in &self.statements {
            if let Statement::Declare { kind, names } = st {
                for n in names {
                    kb.declare(*kind, &n.name);
                }
            }
        }
        let mut errors = Vec::new();
        for st in &self.statements {
            if let Statement::Axiom { axiom, .. } = st {
                match lower_axiom(&kb, axiom) {
                    Ok(c) => kb.add(c),
                    Err(mut e) => errors.append(&mut e),
                }
            }
        }
        if errors.is_empty() {
            debug_assert_eq!(kb.validate(), Ok(()));
            Ok(kb)
        } else {
            Err(errors)
        }
    }
}

fn resolve(kb: &KnowledgeBase, kind: NameKind, id: &Ident) -> Result<Name, TextError> {
    kb.lookup(kind, &id.name)
        .ok_or_else(|| TextError::new(id.span, format!("unknown {kind} name `{}`", id.name)))
}

fn lower_axiom(kb: &KnowledgeBase, ax: &AxiomExpr) -> Result<Constraint, Vec<TextError>> {
    match ax {
        AxiomExpr::Gci(l, r) => {
            let (l, r) = (lower_concept(kb, l), lower_concept(kb, r));
            match (l, r) {
                (Ok(l), Ok(r)) => Ok(Constraint::gci(l, r)),
                (l, r) => Err([l.err(), r.err()].into_iter().flatten().flatten().collect()),
            }
        }
        AxiomExpr::RoleInclusion { chain, sup } => {
            let mut errors = Vec::new();
            let mut names = Vec::new();
            for id in chain.iter().chain(std::iter::once(sup)) {
                match resolve(kb, NameKind::Role, id) {
                    Ok(n) => names.push(n),
                    Err(e) => errors.push(e),
                }
            }
            if !errors.is_empty() {
                return Err(errors);
            }
            let sup = names.pop().expect("superrole present");
            Ok(Constraint::role_inclusion(names, sup))
        }
        AxiomExpr::Names(a, b) => {
            let is = |kind, id: &Ident| kb.lookup(kind, &id.name).is_some();
            let concepts = is(NameKind::Concept, a) && is(NameKind::Concept, b);
            let roles = is(NameKind::Role, a) && is(NameKind::Role, b);
            if concepts && roles {
                return Err(vec![TextError::new(
                    a.span,
                    format!(
                        "`{} <= {}` is ambiguous: both names are declared as concepts and as roles",
                        a.name, b.name
                    ),
                )]);
            }
            let role_like = roles
                || (!concepts
                    && (is(NameKind::Role, a) || is(NameKind::Role, b))
                    && !(is(NameKind::Concept, a) || is(NameKind::Concept, b)));
            if role_like {
                lower_axiom(
                    kb,
                    &AxiomExpr::RoleInclusion {
                        chain: vec![a.clone()],
                        sup: b.clone(),
                    },
                )
            } else {
                lower_axiom(
                    kb,
                    &AxiomExpr::Gci(ConceptExpr::Name(a.clone()), ConceptExpr::Name(b.clone())),
                )
            }
        }
    }
}

pub(crate) fn lower_concept(
    kb: &KnowledgeBase,
    c: &ConceptExpr,
) -> Result<Concept, Vec<TextError>> {
    let mut errors = Vec::new();
    let out = go(kb, c, &mut errors);
    if errors.is_empty() {
        Ok(out.expect("no errors means a concept was built"))
    } else {
        Err(errors)
    }
}

fn go(kb: &KnowledgeBase, c: &ConceptExpr, errors: &mut Vec<TextError>) -> Option<Concept> {
    let name = |kind, id: &Ident, errors: &mut Vec<TextError>| match resolve(kb, kind, id) {
        Ok(n) => Some(n),
        Err(e) => {
            errors.push(e);
            None
        }
    };
    match c {
        ConceptExpr::Top(_) => Some(Concept::Top),
        ConceptExpr::Bottom(_) => Some(Concept::Bottom),
        ConceptExpr::Name(id) => name(NameKind::Concept, id, errors).map(Concept::Atomic),
        ConceptExpr::Nominal(id) => name(NameKind::Individual, id, errors).map(Concept::Nominal),
        ConceptExpr::And(parts, _) => {
            let lowered: Vec<Option<Concept>> = parts.iter().map(|p| go(kb, p, errors)).collect();
            let parts: Option<Vec<Concept>> = lowered.into_iter().collect();
            Concept::conj_all(parts?)
        }
        ConceptExpr::Exists(r, filler, _) => {
            let r = name(NameKind::Role, r, errors);
            let f = go(kb, filler, errors);
            Some(Concept::exists(r?, f?))
        }
        ConceptExpr::Pred {
            predicate,
            features,
            span,
        } => {
            let fs: Vec<Option<Name>> = features
                .iter()
                .map(|f| name(NameKind::Feature, f, errors))
                .collect();
            let expected = cdomains::arity(predicate);
            if expected != features.len() {
                errors.push(TextError::new(
                    *span,
                    format!(
                        "arity mismatch: {predicate} takes {expected} feature(s), got {}",
                        features.len()
                    ),
                ));
                return None;
            }
            let fs: Option<Vec<Name>> = fs.into_iter().collect();
            Some(Concept::Pred(PredicateAtom::new(predicate.clone(), fs?)))
        }
    }
}
