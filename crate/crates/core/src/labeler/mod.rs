//! Sequence labeling: features, linear-chain CRF training, exact
//! constrained decoding, penalty estimation, and semi-supervised training
//! over partial labels.

mod codl;
mod constraints;
mod crf;
mod features;
mod inference;
mod labels;
mod model;
mod optimize;

pub use codl::{codl_train, CodlConfig, CodlOutcome};
pub use constraints::{
    constraint_violations, estimate_rho, rho_from_counts, violation, Constraint, ConstraintId, ConstraintSet, Hardness,
};
pub use crf::{log_likelihood_and_gradient, CrfParams, ForwardBackward, Instance};
pub use features::{potential_types, FeatureExtractor, FeatureTemplates};
pub use inference::{decode, viterbi, Decoded, Lattice, Penalties};
pub use labels::LabelSet;
pub use model::{
    crf_train, instance, load_model, model_from_json, save_model, CrfModel, TrainConfig, TrainReport, MODEL_FORMAT,
    MODEL_VERSION,
};
pub use optimize::{maximize, AscentOptions, AscentResult};

#[derive(Debug, thiserror::Error)]
pub enum LabelerError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("question {question}: {tokens} tokens but {labels} labels")]
    LengthMismatch {
        question: String,
        tokens: usize,
        labels: usize,
    },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("invalid constraint set: {0}")]
    Constraint(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("model file version {found:?} does not match supported version {expected}")]
    ModelVersion { found: Option<u32>, expected: u32 },
    #[error("malformed model file: {0}")]
    ModelFormat(String),
    #[error("cannot access {0}: {1}")]
    Io(String, #[source] std::io::Error),
}
