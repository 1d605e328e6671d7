//! Typed entity store: inverted index over entity text with boolean
//! retrieval, radius queries and type resolution.

mod geo;
mod persist;
mod record;
mod search;
mod text;
mod types;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

pub use geo::{geo_within, haversine_km, EARTH_RADIUS_KM};
pub use persist::{load_index, save_index, INDEX_MAGIC, INDEX_VERSION};
pub use record::{load_records, parse_records, EntityRecord};
pub use search::{boolean_search, BooleanQuery, Hit};
pub use text::{analyze, StopWords, DEFAULT_STOPWORDS};
pub use types::{resolve_type, AliasTable, DEFAULT_ALIASES, DEFAULT_TYPE};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("entities line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("duplicate entity id `{0}`")]
    DuplicateId(String),
    #[error("query has no term groups and no filters")]
    EmptyQuery,
    #[error("index file: {0}")]
    Format(String),
    #[error("index file version {found}, expected {expected}")]
    Version { found: u32, expected: u32 },
    #[error("alias table: {0}")]
    Alias(String),
}

/// Immutable inverted index. Documents are numbered by ascending entity id.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityIndex {
    records: Vec<EntityRecord>,
    stopwords: StopWords,
    postings: BTreeMap<String, Vec<(u32, u32)>>,
    doc_len: Vec<u32>,
    idf: BTreeMap<String, f64>,
    by_type: BTreeMap<String, Vec<u32>>,
    by_city: BTreeMap<String, Vec<u32>>,
    by_id: HashMap<String, u32>,
}

/// Indexes name and text of every record.
pub fn build_index(records: &[EntityRecord], stopwords: &StopWords) -> Result<EntityIndex, IndexError> {
    let mut records = records.to_vec();
    records.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = records.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(IndexError::DuplicateId(w[0].id.clone()));
    }
    let mut postings: BTreeMap<String, Vec<(u32, u32)>> = BTreeMap::new();
    let mut doc_len = Vec::with_capacity(records.len());
    for (d, r) in records.iter().enumerate() {
        let terms = analyze(&format!("{} {}", r.name, r.text), stopwords);
        doc_len.push(terms.len() as u32);
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for t in terms {
            *tf.entry(t).or_default() += 1;
        }
        for (t, n) in tf {
            postings.entry(t).or_default().push((d as u32, n));
        }
    }
    Ok(EntityIndex::from_parts(records, stopwords.clone(), postings, doc_len))
}

impl EntityIndex {
    fn from_parts(
        records: Vec<EntityRecord>,
        stopwords: StopWords,
        postings: BTreeMap<String, Vec<(u32, u32)>>,
        doc_len: Vec<u32>,
    ) -> Self {
        let n = records.len() as f64;
        let idf = postings
            .iter()
            .map(|(t, p)| (t.clone(), (n / p.len() as f64).ln()))
            .collect();
        let mut by_type: BTreeMap<String, Vec<u32>> = BTreeMap::new();
        let mut by_city: BTreeMap<String, Vec<u32>> = BTreeMap::new();
        let mut by_id = HashMap::new();
        for (d, r) in records.iter().enumerate() {
            by_type.entry(r.kb_type.clone()).or_default().push(d as u32);
            by_city.entry(r.city.to_lowercase()).or_default().push(d as u32);
            by_id.insert(r.id.clone(), d as u32);
        }
        EntityIndex {
            records,
            stopwords,
            postings,
            doc_len,
            idf,
            by_type,
            by_city,
            by_id,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[EntityRecord] {
        &self.records
    }

    pub fn record(&self, id: &str) -> Option<&EntityRecord> {
        self.by_id.get(id).map(|&d| &self.records[d as usize])
    }

    pub fn stopwords(&self) -> &StopWords {
        &self.stopwords
    }

    /// Query-side analysis matching the indexing pipeline.
    pub fn analyze(&self, text: &str) -> Vec<String> {
        analyze(text, &self.stopwords)
    }

    pub fn postings(&self, term: &str) -> &[(u32, u32)] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn doc_len(&self, doc: usize) -> usize {
        self.doc_len[doc] as usize
    }

    /// `ln(N / df)`, or 0 for unseen terms.
    pub fn idf(&self, term: &str) -> f64 {
        self.idf.get(term).copied().unwrap_or(0.0)
    }

    pub fn tf(&self, term: &str, doc: usize) -> u32 {
        let p = self.postings(term);
        p.binary_search_by_key(&(doc as u32), |&(d, _)| d)
            .map(|i| p[i].1)
            .unwrap_or(0)
    }

    pub fn kb_types(&self) -> Vec<String> {
        self.by_type.keys().cloned().collect()
    }

    pub fn docs_of_type(&self, kb_type: &str) -> &[u32] {
        self.by_type.get(kb_type).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn docs_in_city(&self, city: &str) -> &[u32] {
        self.by_city.get(&city.to_lowercase()).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The `city` record whose name matches `name` case-insensitively;
    /// the lowest id wins.
    pub fn find_city(&self, name: &str) -> Option<&EntityRecord> {
        let want = name.trim().to_lowercase();
        self.docs_of_type("city")
            .iter()
            .map(|&d| &self.records[d as usize])
            .find(|r| r.name.to_lowercase() == want)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rec(id: &str, kb_type: &str, city: &str, text: &str) -> EntityRecord {
        EntityRecord {
            id: id.into(),
            name: String::new(),
            kb_type: kb_type.into(),
            city: city.into(),
            lat: 0.0,
            lon: 0.0,
            rating: None,
            text: text.into(),
        }
    }

    #[test]
    fn stopword_only_record_stays_filterable() {
        let recs = vec![
            rec("b", "lodging", "Paris", "spa and pool"),
            rec("a", "lodging", "Paris", "the of and"),
            rec("c", "restaurant", "Rome", "pasta"),
        ];
        let idx = build_index(&recs, &StopWords::default()).unwrap();
        assert_eq!(idx.records()[0].id, "a");
        assert_eq!(idx.doc_len(0), 0);
        assert_eq!(idx.docs_of_type("lodging"), &[0, 1]);
        assert_eq!(idx.docs_in_city("PARIS"), &[0, 1]);
        assert!(idx.postings("the").is_empty());
        assert!((idx.idf("spa") - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let recs = vec![rec("a", "lodging", "x", ""), rec("a", "city", "x", "")];
        assert!(matches!(build_index(&recs, &StopWords::none()), Err(IndexError::DuplicateId(id)) if id == "a"));
    }

    #[test]
    fn build_ignores_input_order() {
        let recs = vec![rec("a", "t", "x", "one two"), rec("b", "t", "y", "two three")];
        let rev: Vec<_> = recs.iter().rev().cloned().collect();
        assert_eq!(
            build_index(&recs, &StopWords::none()).unwrap(),
            build_index(&rev, &StopWords::none()).unwrap()
        );
    }

    #[test]
    fn records_validate() {
        let bad = r#"{"id":"a","name":"","kb_type":"city","city":"","lat":95,"lon":0,"text":""}"#;
        assert!(matches!(parse_records(bad), Err(IndexError::Record { line: 1, .. })));
        let ok = r#"{"id":"a","name":"A","kb_type":"city","city":"A","lat":45,"lon":10,"rating":4.5,"text":"t"}"#;
        assert_eq!(parse_records(ok).unwrap()[0].rating, Some(4.5));
    }
}
