use serde::{Deserialize, Serialize};

use super::label::{PartialLabel, TagLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub lemma: String,
    pub pos: String,
    pub ner: String,
    /// Word-vector cluster id; `"UNK"` when the token was not clustered.
    pub cluster: String,
    pub dep_head: Option<usize>,
    pub sentence_idx: usize,
    pub doc_position: usize,
}

impl Token {
    pub fn lower(&self) -> String {
        self.text.to_lowercase()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QuestionMetadata {
    pub city: Option<String>,
}

/// A tokenized multi-sentence post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub tokens: Vec<Token>,
    pub sentence_count: usize,
    pub metadata: QuestionMetadata,
}

impl Question {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn sentence_ids(&self) -> Vec<usize> {
        self.tokens.iter().map(|t| t.sentence_idx).collect()
    }

    /// Surface text of `tokens[start..end]` joined by single spaces.
    pub fn span_text(&self, start: usize, end: usize) -> String {
        self.tokens[start..end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSequence {
    pub question_id: String,
    pub labels: Vec<TagLabel>,
}

impl LabelSequence {
    pub fn new(question_id: impl Into<String>, labels: Vec<TagLabel>) -> Self {
        LabelSequence {
            question_id: question_id.into(),
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialLabeling {
    pub question_id: String,
    pub labels: Vec<PartialLabel>,
}

impl PartialLabeling {
    pub fn unknown_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| matches!(l, PartialLabel::Unknown))
            .count()
    }

    pub fn from_full(seq: &LabelSequence) -> Self {
        PartialLabeling {
            question_id: seq.question_id.clone(),
            labels: seq.labels.iter().map(|&l| PartialLabel::Known(l)).collect(),
        }
    }
}

/// Maximal run of identically-labeled tokens inside one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub label: TagLabel,
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn overlap(&self, other: &Segment) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        hi.saturating_sub(lo)
    }
}
