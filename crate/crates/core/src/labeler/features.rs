//! Token feature templates and the string → index dictionary.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Question, Token};

const WH_TRIGGERS: &[&str] = &["what", "where", "which"];
const REQUEST_VERBS: &[&str] = &[
    "recommend",
    "suggest",
    "looking",
    "find",
    "need",
    "want",
    "book",
    "try",
    "visit",
    "stay",
];
const WH_WINDOW: usize = 5;

/// Which template families are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureTemplates {
    pub lexical: bool,
    pub type_indicator: bool,
    pub attribute_indicator: bool,
    pub descriptive: bool,
    pub cluster: bool,
    pub frequency: bool,
}

impl Default for FeatureTemplates {
    fn default() -> Self {
        FeatureTemplates {
            lexical: true,
            type_indicator: true,
            attribute_indicator: true,
            descriptive: true,
            cluster: true,
            frequency: true,
        }
    }
}

fn is_noun(t: &Token) -> bool {
    t.pos.starts_with("NN")
}

fn is_adj(t: &Token) -> bool {
    t.pos.starts_with("JJ")
}

/// Nouns flagged as potential answer types: the first noun following a
/// WH word or a request verb in the same sentence, or a noun linked to a
/// WH word through the dependency tree.
pub fn potential_types(q: &Question) -> Vec<bool> {
    let toks = &q.tokens;
    let mut out = vec![false; toks.len()];
    for (i, t) in toks.iter().enumerate() {
        let lw = t.lower();
        let wh = WH_TRIGGERS.contains(&lw.as_str());
        let verb = REQUEST_VERBS.contains(&lw.as_str()) || REQUEST_VERBS.contains(&t.lemma.as_str());
        if !(wh || verb) {
            continue;
        }
        if let Some(h) = t.dep_head {
            if wh && is_noun(&toks[h]) {
                out[h] = true;
            }
        }
        for j in i + 1..toks.len().min(i + 1 + WH_WINDOW) {
            if toks[j].sentence_idx != t.sentence_idx {
                break;
            }
            if is_noun(&toks[j]) {
                // extend over a compound noun to its head
                let mut k = j;
                while k + 1 < toks.len() && toks[k + 1].sentence_idx == t.sentence_idx && is_noun(&toks[k + 1]) {
                    k += 1;
                }
                out[k] = true;
                break;
            }
        }
    }
    for (i, t) in toks.iter().enumerate() {
        if is_noun(t) {
            if let Some(h) = t.dep_head {
                if WH_TRIGGERS.contains(&toks[h].lower().as_str()) {
                    out[i] = true;
                }
            }
        }
    }
    out
}

fn ancestor_is_type(q: &Question, i: usize, types: &[bool]) -> bool {
    let toks = &q.tokens;
    let has_deps = toks.iter().any(|t| t.dep_head.is_some());
    if has_deps {
        let mut cur = toks[i].dep_head;
        let mut steps = 0;
        while let Some(h) = cur {
            if h == i || steps > toks.len() {
                break;
            }
            if types[h] {
                return true;
            }
            cur = toks[h].dep_head;
            steps += 1;
        }
        false
    } else {
        // without a parse, treat the next noun within the sentence as the head
        (i + 1..toks.len().min(i + 4))
            .take_while(|&j| toks[j].sentence_idx == toks[i].sentence_idx)
            .find(|&j| is_noun(&toks[j]))
            .is_some_and(|j| types[j])
    }
}

fn freq_bucket(n: usize) -> String {
    if n >= 5 {
        "freq=5+".into()
    } else {
        format!("freq={n}")
    }
}

/// Maps feature strings to dense indices. Growing while unfrozen; frozen
/// extractors drop unseen features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ExtractorRepr", into = "ExtractorRepr")]
pub struct FeatureExtractor {
    pub templates: FeatureTemplates,
    names: Vec<String>,
    index: HashMap<String, u32>,
    frozen: bool,
}

#[derive(Serialize, Deserialize)]
struct ExtractorRepr {
    templates: FeatureTemplates,
    names: Vec<String>,
    frozen: bool,
}

impl From<ExtractorRepr> for FeatureExtractor {
    fn from(r: ExtractorRepr) -> Self {
        let index = r.names.iter().enumerate().map(|(i, n)| (n.clone(), i as u32)).collect();
        FeatureExtractor {
            templates: r.templates,
            names: r.names,
            index,
            frozen: r.frozen,
        }
    }
}

impl From<FeatureExtractor> for ExtractorRepr {
    fn from(e: FeatureExtractor) -> Self {
        ExtractorRepr {
            templates: e.templates,
            names: e.names,
            frozen: e.frozen,
        }
    }
}

impl FeatureExtractor {
    pub fn new(templates: FeatureTemplates) -> Self {
        FeatureExtractor {
            templates,
            names: Vec::new(),
            index: HashMap::new(),
            frozen: false,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    /// Feature strings for every token.
    pub fn feature_strings(&self, q: &Question) -> Vec<Vec<String>> {
        let tm = &self.templates;
        let toks = &q.tokens;
        let types = if tm.type_indicator || tm.attribute_indicator {
            potential_types(q)
        } else {
            vec![false; toks.len()]
        };
        let mut counts: HashMap<String, usize> = HashMap::new();
        if tm.frequency {
            for t in toks {
                *counts.entry(t.lower()).or_default() += 1;
            }
        }
        let last_sentence = toks.last().map_or(0, |t| t.sentence_idx);
        toks.iter()
            .enumerate()
            .map(|(i, t)| {
                let mut fs = vec!["bias".to_string()];
                let lw = t.lower();
                let same_sent = |j: usize| toks[j].sentence_idx == t.sentence_idx;
                if tm.lexical {
                    fs.push(format!("w={lw}"));
                    fs.push(format!("lemma={}", t.lemma));
                    fs.push(format!("pos={}", t.pos));
                    fs.push(format!("ner={}", t.ner));
                    if t.text.chars().next().is_some_and(char::is_uppercase) {
                        fs.push("cap".into());
                    }
                    if t.text.chars().filter(|c| c.is_alphabetic()).count() > 1
                        && !t.text.chars().any(char::is_lowercase)
                    {
                        fs.push("allcap".into());
                    }
                    if t.text.chars().any(|c| c.is_ascii_digit()) {
                        fs.push("num".into());
                    }
                    if !t.text.chars().any(char::is_alphanumeric) {
                        fs.push("punct".into());
                    }
                    if i > 0 && same_sent(i - 1) {
                        fs.push(format!("w-1={}", toks[i - 1].lower()));
                        fs.push(format!("pos-1={}", toks[i - 1].pos));
                    } else {
                        fs.push("w-1=<s>".into());
                    }
                    if i + 1 < toks.len() && same_sent(i + 1) {
                        fs.push(format!("w+1={}", toks[i + 1].lower()));
                        fs.push(format!("pos+1={}", toks[i + 1].pos));
                    } else {
                        fs.push("w+1=</s>".into());
                    }
                    if t.sentence_idx == last_sentence {
                        fs.push("last_sent".into());
                    }
                }
                if tm.type_indicator && types[i] {
                    fs.push("potential_type".into());
                }
                if tm.attribute_indicator && (is_noun(t) || is_adj(t)) && !types[i] && ancestor_is_type(q, i, &types) {
                    fs.push("attr_of_type".into());
                }
                if tm.descriptive {
                    if is_adj(t) && i + 1 < toks.len() && same_sent(i + 1) && is_noun(&toks[i + 1]) {
                        fs.push("desc_modifier".into());
                    }
                    if is_noun(t) && i > 0 && same_sent(i - 1) && is_adj(&toks[i - 1]) {
                        fs.push("desc_head".into());
                    }
                }
                if tm.cluster {
                    fs.push(format!("cl={}", t.cluster));
                }
                if tm.frequency {
                    fs.push(freq_bucket(counts[&lw]));
                }
                fs
            })
            .collect()
    }

    /// Adds every feature of `q` to the dictionary. No-op when frozen.
    pub fn fit(&mut self, q: &Question) {
        if self.frozen {
            return;
        }
        for fs in self.feature_strings(q) {
            for f in fs {
                if !self.index.contains_key(&f) {
                    self.index.insert(f.clone(), self.names.len() as u32);
                    self.names.push(f);
                }
            }
        }
    }

    /// Per-token feature indices; unknown features are dropped.
    pub fn extract(&self, q: &Question) -> Vec<Vec<u32>> {
        self.feature_strings(q)
            .into_iter()
            .map(|fs| {
                let mut ids: Vec<u32> = fs.iter().filter_map(|f| self.lookup(f)).collect();
                ids.sort_unstable();
                ids.dedup();
                ids
            })
            .collect()
    }
}
