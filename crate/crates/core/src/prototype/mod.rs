//! Layout prototype generation: slide concepts, their categorical features,
//! the rule-table fallback and the trainable conditional token model.

mod concept;
mod decode;
mod model;
mod rules;

pub use concept::{
    concepts_from_json, AspectBucket, ConceptFeatures, FunctionalType, PointsBucket, SlideConcept,
    NUM_CONDITIONS,
};
pub use decode::{decode, generate_prototype, greedy_decode, DEFAULT_BEAM};
pub use model::{
    log_softmax, pairs_from_jsonl, pairs_to_jsonl, LpgError, LpgModel, TrainingPair, DEFAULT_L2,
};
pub use rules::{rule_prototype, rule_prototype_text};

/// One training pair per condition, targeting the rule template.
pub fn rule_corpus() -> Vec<TrainingPair> {
    ConceptFeatures::all()
        .map(|f| TrainingPair::new(f, rule_prototype(&f)).expect("templates are valid"))
        .collect()
}
