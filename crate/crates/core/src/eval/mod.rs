//! Segment-matching label scores and end-to-end answer metrics.

mod qa;
mod segments;

use thiserror::Error;

pub use qa::{qa_metrics, QaEvalReport, QaGold, TOP};
pub use segments::{aggregate_f1, segment_prf, LabelEvalReport, Prf, SegmentAccumulator, REPORT_LABELS};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("question {question}: {gold} gold labels vs {predicted} predicted")]
    LengthMismatch {
        question: String,
        gold: usize,
        predicted: usize,
    },
    #[error("no gold answers for question `{0}`")]
    MissingGold(String),
    #[error("gold line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}
