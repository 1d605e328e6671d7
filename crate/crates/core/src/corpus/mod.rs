//! Questions, labels and segments, plus the JSONL ingestion formats.

mod annotate;
mod io;
mod label;
mod types;

use std::path::PathBuf;

pub use annotate::{guess_ner, guess_pos, question_from_text, tokenize};
pub(crate) use io::jsonl_lines;
pub use io::{
    load_crowd, load_labels, load_questions, parse_crowd, parse_labels_file, parse_questions, write_labels,
    AnnotatedQuestion, CrowdAnnotation,
};
pub use label::{PartialLabel, TagLabel, UnknownLabel};
pub use types::{LabelSequence, PartialLabeling, Question, QuestionMetadata, Segment, Token};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("schema error on line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("length mismatch on line {line}: expected {expected} labels, found {found}")]
    LengthMismatch { line: usize, expected: usize, found: usize },
    #[error("label sequences differ in length ({left} vs {right})")]
    LabelLength { left: usize, right: usize },
}

/// Keeps the labels two annotators agree on; disagreements become unknown.
pub fn merge_crowd_annotations(a: &LabelSequence, b: &LabelSequence) -> Result<PartialLabeling, CorpusError> {
    if a.len() != b.len() {
        return Err(CorpusError::LabelLength {
            left: a.len(),
            right: b.len(),
        });
    }
    let labels = a
        .labels
        .iter()
        .zip(&b.labels)
        .map(|(&x, &y)| {
            if x == y {
                PartialLabel::Known(x)
            } else {
                PartialLabel::Unknown
            }
        })
        .collect();
    Ok(PartialLabeling {
        question_id: a.question_id.clone(),
        labels,
    })
}

/// Maximal same-label runs. Runs are cut at sentence boundaries and
/// `other` yields no segment.
pub fn segments_from_labels(question: &Question, labels: &[TagLabel]) -> Vec<Segment> {
    let sentences: Vec<usize> = question.tokens.iter().map(|t| t.sentence_idx).collect();
    segments_from_parts(&sentences, labels)
}

pub(crate) fn segments_from_parts(sentences: &[usize], labels: &[TagLabel]) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        let label = labels[i];
        let mut j = i + 1;
        while j < labels.len() && labels[j] == label && sentences.get(j) == sentences.get(i) {
            j += 1;
        }
        if label != TagLabel::Other {
            out.push(Segment {
                label,
                start: i,
                end: j,
            });
        }
        i = j;
    }
    out
}
