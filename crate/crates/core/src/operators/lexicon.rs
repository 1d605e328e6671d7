use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::OperatorError;
use crate::vectors::{cosine, EmbeddingTable};

/// Operators recognized from trigger words. `Or` is a connective rather
/// than a clause operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TriggerKind {
    Not,
    Or,
    Pref,
    Near,
}

impl TriggerKind {
    pub const ALL: [TriggerKind; 4] = [TriggerKind::Not, TriggerKind::Or, TriggerKind::Pref, TriggerKind::Near];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Seed,
    Expanded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerEntry {
    /// Lowercased tokens of the trigger phrase.
    pub tokens: Vec<String>,
    pub provenance: Provenance,
}

impl TriggerEntry {
    pub fn phrase(&self) -> String {
        self.tokens.join(" ")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriggerLexicon {
    entries: BTreeMap<TriggerKind, Vec<TriggerEntry>>,
}

pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.json");

impl TriggerLexicon {
    /// Parses the JSON map `{"NOT":[..],"OR":[..],"PREF":[..],"NEAR":[..]}`;
    /// every listed word is a seed.
    pub fn from_json(text: &str) -> Result<Self, OperatorError> {
        let raw: BTreeMap<TriggerKind, Vec<String>> =
            serde_json::from_str(text).map_err(|e| OperatorError::Lexicon(e.to_string()))?;
        let mut lex = TriggerLexicon::default();
        for (kind, words) in raw {
            for w in words {
                lex.add(kind, &w, Provenance::Seed);
            }
        }
        for kind in TriggerKind::ALL {
            if lex.entries(kind).is_empty() {
                return Err(OperatorError::Lexicon(format!("no seed words for {kind:?}")));
            }
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OperatorError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| OperatorError::Lexicon(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn default_seeds() -> Self {
        Self::from_json(DEFAULT_LEXICON).expect("shipped lexicon parses")
    }

    pub fn entries(&self, kind: TriggerKind) -> &[TriggerEntry] {
        self.entries.get(&kind).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, kind: TriggerKind, phrase: &str) -> bool {
        let toks = tokens_of(phrase);
        self.entries(kind).iter().any(|e| e.tokens == toks)
    }

    /// Adds a trigger; returns false if it was already present.
    pub fn add(&mut self, kind: TriggerKind, phrase: &str, provenance: Provenance) -> bool {
        let tokens = tokens_of(phrase);
        if tokens.is_empty() || self.contains(kind, phrase) {
            return false;
        }
        self.entries
            .entry(kind)
            .or_default()
            .push(TriggerEntry { tokens, provenance });
        true
    }

    pub fn to_json(&self) -> String {
        let map: BTreeMap<TriggerKind, Vec<String>> = self
            .entries
            .iter()
            .map(|(k, v)| (*k, v.iter().map(TriggerEntry::phrase).collect()))
            .collect();
        serde_json::to_string_pretty(&map).expect("lexicon serializes")
    }
}

fn tokens_of(phrase: &str) -> Vec<String> {
    phrase.split_whitespace().map(str::to_lowercase).collect()
}

pub const DEFAULT_EXPANSION_THRESHOLD: f64 = 0.7;

/// Adds every vocabulary word whose cosine similarity to some seed of a
/// kind reaches `threshold`. Seeds without vectors are skipped.
pub fn expand_trigger_lexicon(seeds: &TriggerLexicon, vectors: &EmbeddingTable, threshold: f64) -> TriggerLexicon {
    let mut out = seeds.clone();
    for kind in TriggerKind::ALL {
        let seed_vecs: Vec<Vec<f64>> = seeds
            .entries(kind)
            .iter()
            .filter(|e| e.provenance == Provenance::Seed)
            .filter_map(|e| {
                let v = vectors.phrase_vector(&e.phrase());
                if v.is_none() {
                    log::debug!("no vector for {kind:?} seed `{}`", e.phrase());
                }
                v
            })
            .collect();
        if seed_vecs.is_empty() {
            continue;
        }
        for (word, v) in vectors.iter() {
            if seed_vecs.iter().any(|s| cosine(s, v) >= threshold) {
                out.add(kind, word, Provenance::Expanded);
            }
        }
    }
    out
}
