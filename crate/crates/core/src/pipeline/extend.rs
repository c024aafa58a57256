use crate::kb::{Concept, KbError, KnowledgeBase, Name, NameKind};

use super::PipelineError;

#[derive(Clone, Debug)]
pub struct AExtensionResult {
    pub kb: KnowledgeBase,
    pub individual: Name,
    pub role: Name,
}

/// Adds `{t} ⊑ ∃r_t.A` for fresh `t` and `r_t`, which forces `A` to be
/// nonempty in every model.
pub fn a_extend(kb: &KnowledgeBase, a: Name) -> Result<AExtensionResult, PipelineError> {
    if a.kind() != NameKind::Concept || !kb.is_declared(a) {
        return Err(PipelineError::Kb(KbError::Undeclared {
            kind: NameKind::Concept,
            label: kb.label(a).to_string(),
        }));
    }
    let mut out = kb.clone();
    let t = out.declare_fresh(NameKind::Individual, "_t");
    let r = out.declare_fresh(NameKind::Role, "_rt");
    out.add_gci(Concept::Nominal(t), Concept::exists(r, Concept::Atomic(a)));
    Ok(AExtensionResult {
        kb: out,
        individual: t,
        role: r,
    })
}
