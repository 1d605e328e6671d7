use std::collections::{BTreeMap, BTreeSet};

use super::{ranked, AnswerList, QaError};
use crate::corpus::Question;
use crate::index::{analyze, boolean_search, BooleanQuery, EntityIndex, StopWords};

pub const SHORTLIST: usize = 10;
pub const KEYWORDS: usize = 3;

/// Document frequencies over a question corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuestionIdf {
    n: usize,
    df: BTreeMap<String, usize>,
}

fn question_terms(q: &Question, stop: &StopWords) -> Vec<String> {
    q.tokens.iter().flat_map(|t| analyze(&t.text, stop)).collect()
}

impl QuestionIdf {
    pub fn fit<'a>(questions: impl IntoIterator<Item = &'a Question>, stop: &StopWords) -> Self {
        let mut out = QuestionIdf::default();
        for q in questions {
            out.n += 1;
            let set: BTreeSet<String> = question_terms(q, stop).into_iter().collect();
            for t in set {
                *out.df.entry(t).or_default() += 1;
            }
        }
        out
    }

    /// `ln(N / max(df, 1))`.
    pub fn idf(&self, term: &str) -> f64 {
        let df = self.df.get(term).copied().unwrap_or(0).max(1);
        (self.n.max(1) as f64 / df as f64).ln()
    }
}

/// Content words ranked by tf·idf within the question, ties by first
/// occurrence; the top `SHORTLIST` are kept.
pub fn webqa_shortlist(question: &Question, idf: &QuestionIdf, stop: &StopWords) -> Vec<(String, f64)> {
    let terms = question_terms(question, stop);
    let mut order: Vec<String> = Vec::new();
    let mut tf: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &terms {
        if !order.contains(t) {
            order.push(t.clone());
        }
        *tf.entry(t).or_default() += 1;
    }
    let mut scored: Vec<(String, f64)> = order
        .into_iter()
        .map(|t| {
            let s = tf[t.as_str()] as f64 * idf.idf(&t);
            (t, s)
        })
        .collect();
    // stable sort keeps first-occurrence order among ties
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    scored.truncate(SHORTLIST);
    scored
}

pub fn webqa_keywords(question: &Question, idf: &QuestionIdf, stop: &StopWords) -> Result<Vec<String>, QaError> {
    let list = webqa_shortlist(question, idf, stop);
    if list.is_empty() {
        return Err(QaError::EmptyKeywords(question.id.clone()));
    }
    Ok(list.into_iter().take(KEYWORDS).map(|(t, _)| t).collect())
}

/// Keyword baseline: all keywords are required, restricted to the
/// question's city. While nothing is found, the least important keyword is
/// dropped, down to a single one. Manual words, when given, replace the
/// automatic choice and are taken in importance order.
pub fn webqa_answer(
    question: &Question,
    index: &EntityIndex,
    idf: &QuestionIdf,
    k: usize,
    manual_words: Option<&[String]>,
) -> Result<AnswerList, QaError> {
    let mut words: Vec<String> = match manual_words {
        Some(m) => {
            let mut w: Vec<String> = Vec::new();
            for t in m.iter().flat_map(|m| index.analyze(m)) {
                if !w.contains(&t) {
                    w.push(t);
                }
            }
            if w.is_empty() {
                return Err(QaError::EmptyKeywords(question.id.clone()));
            }
            w
        }
        None => webqa_keywords(question, idf, index.stopwords())?,
    };
    let city_filter = question.metadata.city.clone().map(|c| vec![c]);
    let mut backoff = 0u8;
    loop {
        let q = BooleanQuery {
            must: words.iter().map(|w| vec![w.clone()]).collect(),
            city_filter: city_filter.clone(),
            ..Default::default()
        };
        let hits = boolean_search(index, &q, k)?;
        if !hits.is_empty() || words.len() <= 1 {
            return Ok(ranked(&question.id, index, hits, backoff));
        }
        words.pop();
        backoff += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::question_from_text;

    fn corpus() -> Vec<Question> {
        [
            "hotel with a spa in town",
            "hotel with a pool",
            "cheap hotel near the station",
            "hotel for families with a pool",
            "quiet hotel with a hammam",
        ]
        .iter()
        .enumerate()
        .map(|(i, t)| question_from_text(&format!("q{i}"), t, None))
        .collect()
    }

    #[test]
    fn rare_word_ranks_first() {
        let qs = corpus();
        let stop = StopWords::default();
        let idf = QuestionIdf::fit(&qs, &stop);
        // hotel: df 5 -> 0; quiet, hammam: df 1 -> ln 5; tie kept in order
        assert_eq!(
            webqa_keywords(&qs[4], &idf, &stop).unwrap(),
            vec!["quiet", "hammam", "hotel"]
        );
        assert_eq!(webqa_keywords(&qs[1], &idf, &stop).unwrap(), vec!["pool", "hotel"]);
        let empty = question_from_text("e", "what is the", None);
        assert!(matches!(
            webqa_keywords(&empty, &idf, &stop),
            Err(QaError::EmptyKeywords(_))
        ));
    }
}
