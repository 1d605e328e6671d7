use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::annotate::{guess_ner, guess_pos};
use super::label::TagLabel;
use super::types::{LabelSequence, Question, QuestionMetadata, Token};
use super::CorpusError;

#[derive(Debug, Deserialize)]
struct RawToken {
    t: String,
    lemma: Option<String>,
    pos: Option<String>,
    ner: Option<String>,
    cluster: Option<String>,
    dep_head: Option<usize>,
    sent: usize,
}

#[derive(Debug, Default, Deserialize)]
struct RawMetadata {
    city: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawQuestion {
    id: String,
    #[serde(default)]
    metadata: RawMetadata,
    tokens: Vec<RawToken>,
    gold: Option<Vec<String>>,
}

/// A question together with its gold labels, when the file provides them.
#[derive(Debug, Clone)]
pub struct AnnotatedQuestion {
    pub question: Question,
    pub gold: Option<LabelSequence>,
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-blank lines with their 1-based line numbers.
pub(crate) fn jsonl_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn load_questions(path: impl AsRef<Path>) -> Result<Vec<AnnotatedQuestion>, CorpusError> {
    parse_questions(&read_to_string(path.as_ref())?)
}

pub fn parse_questions(text: &str) -> Result<Vec<AnnotatedQuestion>, CorpusError> {
    jsonl_lines(text)
        .map(|(line, l)| {
            let raw: RawQuestion = serde_json::from_str(l).map_err(|e| CorpusError::Schema {
                line,
                message: e.to_string(),
            })?;
            convert_question(raw, line)
        })
        .collect()
}

fn convert_question(raw: RawQuestion, line: usize) -> Result<AnnotatedQuestion, CorpusError> {
    let schema = |message: String| CorpusError::Schema { line, message };
    if raw.tokens.is_empty() {
        return Err(schema(format!("question `{}` has no tokens", raw.id)));
    }
    let n = raw.tokens.len();
    let mut tokens = Vec::with_capacity(n);
    let mut prev_sent = 0;
    for (i, rt) in raw.tokens.into_iter().enumerate() {
        if rt.sent < prev_sent {
            return Err(schema(format!(
                "sentence index decreases at token {i} ({} after {prev_sent})",
                rt.sent
            )));
        }
        if let Some(h) = rt.dep_head {
            if h >= n {
                return Err(schema(format!("dep_head {h} of token {i} out of range")));
            }
        }
        let sentence_initial = i == 0 || rt.sent != prev_sent;
        prev_sent = rt.sent;
        tokens.push(Token {
            lemma: rt.lemma.unwrap_or_else(|| rt.t.to_lowercase()),
            pos: rt.pos.unwrap_or_else(|| guess_pos(&rt.t, sentence_initial)),
            ner: rt.ner.unwrap_or_else(|| guess_ner(&rt.t, sentence_initial)),
            cluster: rt.cluster.unwrap_or_else(|| "UNK".to_string()),
            dep_head: rt.dep_head,
            sentence_idx: rt.sent,
            doc_position: i,
            text: rt.t,
        });
    }
    let question = Question {
        id: raw.id,
        sentence_count: prev_sent + 1,
        tokens,
        metadata: QuestionMetadata {
            city: raw.metadata.city,
        },
    };
    let gold = match raw.gold {
        None => None,
        Some(g) => {
            if g.len() != n {
                return Err(CorpusError::LengthMismatch {
                    line,
                    expected: n,
                    found: g.len(),
                });
            }
            Some(LabelSequence::new(question.id.clone(), parse_labels(&g, line)?))
        }
    };
    Ok(AnnotatedQuestion { question, gold })
}

fn parse_labels(raw: &[String], line: usize) -> Result<Vec<TagLabel>, CorpusError> {
    raw.iter()
        .map(|s| {
            s.parse::<TagLabel>().map_err(|e| CorpusError::Schema {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Deserialize)]
struct RawCrowd {
    id: String,
    ann_a: Vec<String>,
    ann_b: Vec<String>,
}

/// One question's pair of crowd annotations.
#[derive(Debug, Clone)]
pub struct CrowdAnnotation {
    pub a: LabelSequence,
    pub b: LabelSequence,
}

pub fn load_crowd(path: impl AsRef<Path>) -> Result<Vec<CrowdAnnotation>, CorpusError> {
    parse_crowd(&read_to_string(path.as_ref())?)
}

pub fn parse_crowd(text: &str) -> Result<Vec<CrowdAnnotation>, CorpusError> {
    jsonl_lines(text)
        .map(|(line, l)| {
            let raw: RawCrowd = serde_json::from_str(l).map_err(|e| CorpusError::Schema {
                line,
                message: e.to_string(),
            })?;
            if raw.ann_a.len() != raw.ann_b.len() {
                return Err(CorpusError::LengthMismatch {
                    line,
                    expected: raw.ann_a.len(),
                    found: raw.ann_b.len(),
                });
            }
            Ok(CrowdAnnotation {
                a: LabelSequence::new(raw.id.clone(), parse_labels(&raw.ann_a, line)?),
                b: LabelSequence::new(raw.id, parse_labels(&raw.ann_b, line)?),
            })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelsRecord {
    id: String,
    labels: Vec<TagLabel>,
}

/// Label files are JSONL: `{"id":str,"labels":[str]}`.
pub fn write_labels(seqs: &[LabelSequence]) -> String {
    let mut out = String::new();
    for s in seqs {
        let rec = LabelsRecord {
            id: s.question_id.clone(),
            labels: s.labels.clone(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("labels serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_labels_file(text: &str) -> Result<Vec<LabelSequence>, CorpusError> {
    jsonl_lines(text)
        .map(|(line, l)| {
            let rec: LabelsRecord = serde_json::from_str(l).map_err(|e| CorpusError::Schema {
                line,
                message: e.to_string(),
            })?;
            Ok(LabelSequence::new(rec.id, rec.labels))
        })
        .collect()
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<LabelSequence>, CorpusError> {
    parse_labels_file(&read_to_string(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{"id":"q1","metadata":{"city":"Salzburg"},"tokens":[{"t":"Good","sent":0},{"t":"hotel","sent":0,"pos":"NN"},{"t":"?","sent":0}],"gold":["x.attribute","x.type","other"]}
{"id":"q2","tokens":[{"t":"Hi","sent":0},{"t":"there","sent":1,"cluster":"17"}]}
"#;

    #[test]
    fn loads_two_questions() {
        let qs = parse_questions(TWO).unwrap();
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0].question.metadata.city.as_deref(), Some("Salzburg"));
        assert_eq!(qs[0].gold.as_ref().unwrap().labels[1], TagLabel::Type);
        assert_eq!(qs[0].question.tokens[1].pos, "NN");
        assert_eq!(qs[1].question.sentence_count, 2);
        assert_eq!(qs[1].question.tokens[1].cluster, "17");
        assert_eq!(qs[1].question.tokens[0].cluster, "UNK");
        assert!(qs[1].gold.is_none());
    }

    #[test]
    fn short_gold_is_length_mismatch() {
        let bad = r#"{"id":"q","tokens":[{"t":"a","sent":0},{"t":"b","sent":0}],"gold":["other"]}"#;
        match parse_questions(bad) {
            Err(CorpusError::LengthMismatch {
                line: 1,
                expected: 2,
                found: 1,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decreasing_sentence_is_schema_error() {
        let bad = r#"{"id":"q","tokens":[{"t":"a","sent":1},{"t":"b","sent":0}]}"#;
        assert!(matches!(parse_questions(bad), Err(CorpusError::Schema { line: 1, .. })));
    }

    #[test]
    fn malformed_json_reports_line() {
        let bad = "{\"id\":\"q\",\"tokens\":[{\"t\":\"a\",\"sent\":0}]}\n{oops";
        assert!(matches!(parse_questions(bad), Err(CorpusError::Schema { line: 2, .. })));
    }

    #[test]
    fn crowd_roundtrip_through_parser() {
        let c = parse_crowd(r#"{"id":"q","ann_a":["x.type","other"],"ann_b":["x.type","x.attribute"]}"#).unwrap();
        assert_eq!(c[0].a.labels, vec![TagLabel::Type, TagLabel::Other]);
        let labels = write_labels(&[c[0].b.clone()]);
        assert_eq!(parse_labels_file(&labels).unwrap()[0], c[0].b);
    }
}
