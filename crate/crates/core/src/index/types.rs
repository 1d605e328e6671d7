use std::collections::BTreeMap;

use super::IndexError;
use crate::vectors::{cosine, EmbeddingTable};

pub const DEFAULT_ALIASES: &str = include_str!("../../data/aliases.json");
pub const DEFAULT_TYPE: &str = "point_of_interest";

/// Lowercased textual type → kb_type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasTable(BTreeMap<String, String>);

impl AliasTable {
    pub fn from_json(text: &str) -> Result<Self, IndexError> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text).map_err(|e| IndexError::Alias(e.to_string()))?;
        Ok(AliasTable(raw.into_iter().map(|(k, v)| (normalize(&k), v)).collect()))
    }

    pub fn none() -> Self {
        AliasTable(BTreeMap::new())
    }

    pub fn get(&self, phrase: &str) -> Option<&str> {
        self.0.get(&normalize(phrase)).map(String::as_str)
    }
}

impl Default for AliasTable {
    fn default() -> Self {
        Self::from_json(DEFAULT_ALIASES).expect("shipped aliases parse")
    }
}

fn normalize(s: &str) -> String {
    s.to_lowercase()
        .replace('_', " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// The phrase, its singular, its head noun and the head's singular.
fn variants(phrase: &str) -> Vec<String> {
    let p = normalize(phrase);
    let mut out = vec![p.clone()];
    let mut push = |v: String| {
        if !v.is_empty() && !out.contains(&v) {
            out.push(v);
        }
    };
    push(p.split(' ').map(singular).collect::<Vec<_>>().join(" "));
    if let Some(head) = p.rsplit(' ').next() {
        push(head.to_string());
        push(singular(head));
    }
    out
}

fn singular(w: &str) -> String {
    if let Some(s) = w.strip_suffix("ies") {
        format!("{s}y")
    } else if let Some(s) = w
        .strip_suffix("es")
        .filter(|s| s.ends_with("ss") || s.ends_with("sh") || s.ends_with("ch"))
    {
        s.to_string()
    } else if let Some(s) = w.strip_suffix('s').filter(|s| !s.ends_with('s')) {
        s.to_string()
    } else {
        w.to_string()
    }
}

/// Maps a type phrase onto one of `known` kb_types: exact match, then the
/// alias table, then the highest cosine similarity, then `point_of_interest`
/// (or the first known type when that is absent). Never fails.
pub fn resolve_type(phrase: &str, known: &[String], vectors: &EmbeddingTable, aliases: &AliasTable) -> String {
    let fallback = || {
        if known.is_empty() || known.iter().any(|k| k == DEFAULT_TYPE) {
            DEFAULT_TYPE.to_string()
        } else {
            known[0].clone()
        }
    };
    let vars = variants(phrase);
    for v in &vars {
        if let Some(k) = known.iter().find(|k| normalize(k) == *v) {
            return k.clone();
        }
    }
    for v in &vars {
        if let Some(t) = aliases.get(v) {
            if let Some(k) = known.iter().find(|k| *k == t) {
                return k.clone();
            }
        }
    }
    if let Some(pv) = vectors.phrase_vector(phrase) {
        let mut best: Option<(f64, &String)> = None;
        for k in known {
            if let Some(kv) = vectors.phrase_vector(&normalize(k)) {
                let c = cosine(&pv, &kv);
                if best.map_or(true, |(b, _)| c > b) {
                    best = Some((c, k));
                }
            }
        }
        if let Some((_, k)) = best {
            return k.clone();
        }
    }
    fallback()
}
