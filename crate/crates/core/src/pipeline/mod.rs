//! Pre-classification stages: query transformation, normalization and
//! A-extension.

mod extend;
mod measure;
mod normalize;
mod transform;

use thiserror::Error;

use crate::kb::{KbError, Violation};

pub use extend::{a_extend, AExtensionResult};
pub use measure::{constraint_measure, nf3_component, nf_measure};
pub use normalize::{
    check_normal_form, is_normal, normalize, normalize_traced, NfRule, NormalizationStep,
};
pub use transform::{transform, TransformResult};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("query concept is not over the knowledge base's names: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Query(Vec<Violation>),
    #[error("normalization measure did not decrease at {rule:?}: {before} -> {after}")]
    MeasureNotDecreasing {
        rule: NfRule,
        before: u64,
        after: u64,
    },
}
