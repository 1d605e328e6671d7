//! Recommendation-question understanding and answering.
//!
//! A question is tokenized and labeled with semantic tags by a linear-chain
//! CRF (optionally with constrained decoding and semi-supervised training),
//! operator rules turn the labeled phrases into a structured query, and the
//! query is answered against a local entity index.

pub mod config;
pub mod corpus;
pub mod eval;
pub mod index;
pub mod labeler;
pub mod operators;
pub mod qa;
pub mod rql;
pub mod vectors;

pub use config::PipelineConfig;
pub use corpus::{LabelSequence, PartialLabel, PartialLabeling, Question, QuestionMetadata, Segment, TagLabel, Token};
pub use index::{EntityIndex, EntityRecord};
pub use labeler::{ConstraintSet, CrfModel, LabelSet};
pub use qa::AnswerList;
pub use rql::{Clause, Connective, Operator, RqlQuery, SemanticLabel};
