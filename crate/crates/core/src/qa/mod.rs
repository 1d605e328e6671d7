//! Question answering over the entity index: query compilation with
//! back-off, and a keyword baseline.

mod compile;
mod webqa;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compile::{compile_query, CompiledQuery, NearPlan, MAX_BACKOFF};
pub use webqa::{webqa_answer, webqa_keywords, webqa_shortlist, QuestionIdf, KEYWORDS, SHORTLIST};

use crate::corpus::{jsonl_lines, Question, QuestionMetadata, TagLabel};
use crate::index::{boolean_search, AliasTable, EntityIndex, Hit, IndexError};
use crate::operators::{labels_to_rql, OperatorError, TriggerLexicon};
use crate::rql::RqlQuery;
use crate::vectors::EmbeddingTable;

pub const DEFAULT_NEAR_RADIUS_KM: f64 = 100.0;
pub const DEFAULT_K: usize = 3;

#[derive(Debug, Error)]
pub enum QaError {
    #[error("compile: {0}")]
    Compile(String),
    #[error("question {0}: no usable keywords")]
    EmptyKeywords(String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("{0}")]
    Io(String),
    #[error("answers line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone)]
pub struct QaContext {
    pub vectors: EmbeddingTable,
    pub aliases: AliasTable,
    pub near_radius_km: f64,
    pub backoff: bool,
}

impl Default for QaContext {
    fn default() -> Self {
        QaContext {
            vectors: EmbeddingTable::empty(),
            aliases: AliasTable::default(),
            near_radius_km: DEFAULT_NEAR_RADIUS_KM,
            backoff: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntity {
    pub entity: String,
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerList {
    pub id: String,
    pub attempted: bool,
    pub backoff: u8,
    pub answers: Vec<RankedEntity>,
}

pub(crate) fn ranked(id: &str, index: &EntityIndex, hits: Vec<Hit>, backoff: u8) -> AnswerList {
    let answers: Vec<RankedEntity> = hits
        .into_iter()
        .map(|h| RankedEntity {
            name: index.record(&h.id).map(|r| r.name.clone()).unwrap_or_default(),
            entity: h.id,
            score: h.score,
        })
        .collect();
    AnswerList {
        id: id.to_string(),
        attempted: !answers.is_empty(),
        backoff,
        answers,
    }
}

/// Runs the compiled query, relaxing it level by level while it returns
/// nothing.
pub fn answer_question(
    id: &str,
    rql: &RqlQuery,
    metadata: &QuestionMetadata,
    index: &EntityIndex,
    ctx: &QaContext,
    k: usize,
) -> Result<AnswerList, QaError> {
    let compiled = compile_query(rql, metadata, index, ctx)?;
    answer_compiled(id, &compiled, index, ctx, k)
}

pub fn answer_compiled(
    id: &str,
    compiled: &CompiledQuery,
    index: &EntityIndex,
    ctx: &QaContext,
    k: usize,
) -> Result<AnswerList, QaError> {
    let top = if ctx.backoff { MAX_BACKOFF } else { 0 };
    let mut last = 0;
    for level in 0..=top {
        let Some(q) = compiled.at_level(level) else { continue };
        last = level;
        let hits = boolean_search(index, &q, k)?;
        if !hits.is_empty() {
            return Ok(ranked(id, index, hits, level));
        }
    }
    Ok(ranked(id, index, Vec::new(), last))
}

/// Labels → operators → query → answers.
pub fn answer_labeled(
    question: &Question,
    labels: &[TagLabel],
    lexicon: &TriggerLexicon,
    window: usize,
    index: &EntityIndex,
    ctx: &QaContext,
    k: usize,
) -> Result<(RqlQuery, AnswerList), QaError> {
    let assembly = labels_to_rql(question, labels, lexicon, window)?;
    let answers = answer_question(&question.id, &assembly.query, &question.metadata, index, ctx, k)?;
    Ok((assembly.query, answers))
}

pub fn write_answers(w: &mut impl Write, answers: &[AnswerList]) -> std::io::Result<()> {
    for a in answers {
        serde_json::to_writer(&mut *w, a)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn parse_answers(text: &str) -> Result<Vec<AnswerList>, QaError> {
    jsonl_lines(text)
        .map(|(line, l)| {
            serde_json::from_str(l).map_err(|e| QaError::Format {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn load_answers(path: impl AsRef<Path>) -> Result<Vec<AnswerList>, QaError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| QaError::Io(format!("{}: {e}", path.display())))?;
    parse_answers(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{build_index, EntityRecord, StopWords};
    use crate::rql::parse_rql;

    fn rec(id: &str, kb_type: &str, city: &str, lat: f64, lon: f64, text: &str) -> EntityRecord {
        EntityRecord {
            id: id.into(),
            name: id.to_uppercase(),
            kb_type: kb_type.into(),
            city: city.into(),
            lat,
            lon,
            rating: None,
            text: text.into(),
        }
    }

    fn index() -> EntityIndex {
        build_index(
            &[
                rec("salzburg", "city", "Salzburg", 47.8095, 13.0550, "mozart"),
                rec("hallein", "city", "Hallein", 47.6833, 13.1, "salt mines"),
                rec("vienna", "city", "Vienna", 48.2082, 16.3738, "opera"),
                rec("h1", "lodging", "Salzburg", 47.80, 13.04, "spa quiet garden"),
                rec("h2", "lodging", "Hallein", 47.68, 13.10, "spa noisy bar"),
                rec("h3", "lodging", "Vienna", 48.2, 16.37, "pool quiet"),
                rec("r1", "restaurant", "Vienna", 48.2, 16.37, "very spicy curry"),
                rec("r2", "restaurant", "Vienna", 48.2, 16.37, "mild curry"),
            ],
            &StopWords::default(),
        )
        .unwrap()
    }

    fn ids(a: &AnswerList) -> Vec<&str> {
        a.answers.iter().map(|e| e.entity.as_str()).collect()
    }

    fn ask(rql: &str, city: Option<&str>) -> AnswerList {
        let meta = QuestionMetadata {
            city: city.map(String::from),
        };
        answer_question("q", &parse_rql(rql).unwrap(), &meta, &index(), &QaContext::default(), 3).unwrap()
    }

    #[test]
    fn strict_query_needs_no_backoff() {
        let a = ask(r#"select x where x.type="hotel" & x.attribute="spa""#, None);
        assert_eq!((a.backoff, ids(&a)), (0, vec!["h1", "h2"]));
    }

    #[test]
    fn backoff_levels() {
        let a = ask(
            r#"select x where x.type="hotel" & x.attribute="spa" & x.attribute="pool""#,
            None,
        );
        assert_eq!(a.backoff, 1);
        assert_eq!(a.answers.len(), 3);
        let b = ask(r#"select x where x.type="hotel" & x.attribute="sauna""#, Some("Vienna"));
        assert_eq!((b.backoff, ids(&b)), (2, vec!["h3"]));
        let none = ask(
            r#"select x where x.type="hotel" & x.attribute="sauna""#,
            Some("Atlantis"),
        );
        assert!(!none.attempted);
    }

    #[test]
    fn not_and_or_compile() {
        let idx = index();
        let ctx = QaContext::default();
        let meta = QuestionMetadata::default();
        let q = parse_rql(r#"select x where x.type="restaurant" & x.attribute NOT = "very spicy""#).unwrap();
        let c = compile_query(&q, &meta, &idx, &ctx).unwrap();
        assert_eq!(c.excluded, vec![vec!["spicy".to_string()]]);
        assert_eq!(c.type_filter.as_deref(), Some("restaurant"));
        let a = answer_compiled("q", &c, &idx, &ctx, 3).unwrap();
        assert_eq!(ids(&a), vec!["r2"]);

        let q = parse_rql(r#"select x where x.type="hotel" & (x.attribute="pool" | x.attribute="garden")"#).unwrap();
        let c = compile_query(&q, &meta, &idx, &ctx).unwrap();
        assert_eq!(c.attributes, vec![vec!["pool".to_string(), "garden".to_string()]]);
        let pref =
            parse_rql(r#"select x where x.type="hotel" & (x.attribute PREF = "pool" | x.attribute="garden")"#).unwrap();
        assert_eq!(
            compile_query(&pref, &meta, &idx, &ctx).unwrap().at_level(0),
            c.at_level(0)
        );

        let bad = parse_rql(r#"select x where x.location="Vienna""#).unwrap();
        assert!(matches!(
            compile_query(&bad, &meta, &idx, &ctx),
            Err(QaError::Compile(_))
        ));
    }

    #[test]
    fn near_two_stage() {
        let a = ask(
            r#"select x where x.type="hotel" & x.attribute="spa" & x.location NEAR "Salzburg""#,
            None,
        );
        assert_eq!(ids(&a), vec!["h1", "h2"]);
        let c = compile_query(
            &parse_rql(r#"select x where x.type="hotel" & x.location NEAR "Salzburg""#).unwrap(),
            &QuestionMetadata::default(),
            &index(),
            &QaContext::default(),
        )
        .unwrap();
        let plan = c.near.unwrap();
        assert_eq!(
            plan.cities.iter().map(|c| c.0.as_str()).collect::<Vec<_>>(),
            vec!["SALZBURG", "HALLEIN"]
        );
    }

    #[test]
    fn answers_jsonl_round_trip() {
        let a = ask(r#"select x where x.type="hotel" & x.attribute="spa""#, None);
        let mut buf = Vec::new();
        write_answers(&mut buf, &[a.clone()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text
            .starts_with(r#"{"id":"q","attempted":true,"backoff":0,"answers":[{"entity":"h1","name":"H1","score":"#));
        assert_eq!(parse_answers(&text).unwrap(), vec![a]);
    }
}
