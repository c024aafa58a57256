use crate::kb::{Concept, KnowledgeBase, Name, NameKind};

use super::PipelineError;

#[derive(Clone, Debug)]
pub struct TransformResult {
    pub kb: KnowledgeBase,
    /// Fresh name standing for the subsumee.
    pub subsumee: Name,
    /// Fresh name standing for the subsumer.
    pub subsumer: Name,
}

/// Reduces `C ⊑ D` to a subsumption between two fresh concept names by
/// appending `A ⊑ C` and `D ⊑ B`.
pub fn transform(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
) -> Result<TransformResult, PipelineError> {
    kb.ensure_valid()?;
    for q in [c, d] {
        kb.validate_concept(q).map_err(PipelineError::Query)?;
    }
    let mut out = kb.clone();
    let a = out.declare_fresh(NameKind::Concept, "_sub");
    let b = out.declare_fresh(NameKind::Concept, "_sup");
    out.add_gci(Concept::Atomic(a), c.clone());
    out.add_gci(d.clone(), Concept::Atomic(b));
    Ok(TransformResult {
        kb: out,
        subsumee: a,
        subsumer: b,
    })
}
