//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use msrq_core::corpus::{Question, QuestionMetadata, TagLabel, Token};
use msrq_core::index::{BooleanQuery, EntityRecord};
use msrq_core::labeler::{CrfModel, CrfParams, FeatureExtractor, FeatureTemplates, LabelSet};
use msrq_core::rql::{Connective, Operator, RqlQuery};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const TIE: f64 = 1e-9;

// ---------- chain scoring and brute-force decoding ----------

#[derive(Debug, Clone)]
pub struct Chain {
    pub emissions: Vec<Vec<f64>>,
    pub transitions: Vec<Vec<f64>>,
    pub sentences: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Pen {
    pub type_label: Option<usize>,
    pub attr_label: Option<usize>,
    pub hard_type: bool,
    pub attr_rho: f64,
    pub same_rho: f64,
}

impl Chain {
    pub fn random(r: &mut ChaCha8Rng, max_len: usize, labels: usize) -> Self {
        let n = r.gen_range(1..=max_len);
        let mut sentences = Vec::with_capacity(n);
        let mut s = 0;
        for t in 0..n {
            if t > 0 && r.gen_bool(0.3) {
                s += 1;
            }
            sentences.push(s);
        }
        Chain {
            emissions: (0..n)
                .map(|_| (0..labels).map(|_| r.gen_range(-2.0..2.0)).collect())
                .collect(),
            transitions: (0..labels)
                .map(|_| (0..labels).map(|_| r.gen_range(-2.0..2.0)).collect())
                .collect(),
            sentences,
        }
    }

    pub fn len(&self) -> usize {
        self.emissions.len()
    }

    pub fn score(&self, y: &[usize]) -> f64 {
        let mut s = 0.0;
        for t in 0..y.len() {
            s += self.emissions[t][y[t]];
            if t > 0 {
                s += self.transitions[y[t - 1]][y[t]];
            }
        }
        s
    }

    /// Number of distinct sentences holding a token with `label`.
    pub fn sentences_with(&self, y: &[usize], label: usize) -> usize {
        y.iter()
            .zip(&self.sentences)
            .filter(|(l, _)| **l == label)
            .map(|(_, s)| *s)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Penalized objective; `None` when the hard type constraint fails.
    pub fn objective(&self, y: &[usize], p: &Pen) -> Option<f64> {
        let mut v = self.score(y);
        if let Some(tl) = p.type_label {
            let k = self.sentences_with(y, tl);
            if p.hard_type && k == 0 {
                return None;
            }
            v -= p.same_rho * k.saturating_sub(1) as f64;
        }
        if let Some(al) = p.attr_label {
            if !y.contains(&al) {
                v -= p.attr_rho;
            }
        }
        Some(v)
    }
}

/// Exhaustive search in lexicographic order; a later labeling replaces the
/// incumbent only when strictly better beyond the tie tolerance.
pub fn brute_force(
    n: usize,
    labels: usize,
    clamps: Option<&[Option<usize>]>,
    f: impl Fn(&[usize]) -> Option<f64>,
) -> Option<(Vec<usize>, f64)> {
    let mut y = vec![0usize; n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let ok = clamps.map_or(true, |c| c.iter().zip(&y).all(|(c, v)| c.map_or(true, |c| c == *v)));
        if ok {
            if let Some(v) = f(&y) {
                let better = match &best {
                    None => true,
                    Some((_, b)) => v > b + TIE * b.abs().max(1.0),
                };
                if better {
                    best = Some((y.clone(), v));
                }
            }
        }
        // odometer increment, last position fastest
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            y[i] += 1;
            if y[i] < labels {
                break;
            }
            y[i] = 0;
        }
    }
}

/// Constrained brute force, lifting the hard constraint when the clamps
/// make it unsatisfiable.
pub fn brute_force_ccm(c: &Chain, labels: usize, p: &Pen, clamps: Option<&[Option<usize>]>) -> (Vec<usize>, f64) {
    brute_force(c.len(), labels, clamps, |y| c.objective(y, p))
        .or_else(|| {
            let soft = Pen { hard_type: false, ..*p };
            brute_force(c.len(), labels, clamps, |y| c.objective(y, &soft))
        })
        .expect("some labeling exists")
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

// ---------- random models over synthetic questions ----------

pub fn question(id: &str, words: &[String], sentences: &[usize]) -> Question {
    let tokens = words
        .iter()
        .zip(sentences)
        .enumerate()
        .map(|(i, (w, &s))| Token {
            text: w.clone(),
            lemma: w.to_lowercase(),
            pos: "NN".into(),
            ner: "O".into(),
            cluster: "UNK".into(),
            dep_head: None,
            sentence_idx: s,
            doc_position: i,
        })
        .collect();
    Question {
        id: id.into(),
        tokens,
        sentence_count: sentences.last().map_or(0, |s| s + 1),
        metadata: QuestionMetadata::default(),
    }
}

pub fn random_question(r: &mut ChaCha8Rng, id: &str, max_len: usize, vocab: usize) -> Question {
    let n = r.gen_range(1..=max_len);
    let words: Vec<String> = (0..n).map(|_| format!("w{}", r.gen_range(0..vocab))).collect();
    let mut sentences = Vec::with_capacity(n);
    let mut s = 0;
    for t in 0..n {
        if t > 0 && r.gen_bool(0.3) {
            s += 1;
        }
        sentences.push(s);
    }
    question(id, &words, &sentences)
}

pub fn lexical_templates() -> FeatureTemplates {
    FeatureTemplates {
        lexical: true,
        type_indicator: false,
        attribute_indicator: false,
        descriptive: false,
        cluster: false,
        frequency: false,
    }
}

/// A model with a dictionary fitted on `questions` and uniform random weights.
pub fn random_model(r: &mut ChaCha8Rng, questions: &[Question]) -> CrfModel {
    let mut ex = FeatureExtractor::new(lexical_templates());
    for q in questions {
        ex.fit(q);
    }
    ex.freeze();
    let labels = LabelSet::default_subset();
    let mut params = CrfParams::zeros(ex.len(), labels.len());
    for w in params.weights.iter_mut() {
        *w = r.gen_range(-1.5..1.5);
    }
    CrfModel {
        labels,
        extractor: ex,
        params,
        sigma2: 10.0,
    }
}

/// Chain scores of `q` under `model`, summed directly from the weights.
pub fn model_chain(model: &CrfModel, q: &Question) -> Chain {
    let l = model.labels.len();
    let feats = model.extractor.extract(q);
    let p = &model.params;
    Chain {
        emissions: feats
            .iter()
            .map(|fs| {
                (0..l)
                    .map(|y| fs.iter().map(|&f| p.weights[p.emission_index(f, y)]).sum())
                    .collect()
            })
            .collect(),
        transitions: (0..l)
            .map(|a| (0..l).map(|b| p.weights[p.transition_index(a, b)]).collect())
            .collect(),
        sentences: q.tokens.iter().map(|t| t.sentence_idx).collect(),
    }
}

pub fn indices(labels: &LabelSet, seq: &[TagLabel]) -> Vec<usize> {
    seq.iter().map(|&t| labels.index_of(t).expect("label in set")).collect()
}

// ---------- synthetic hidden chain corpus ----------

/// A hidden 4-state chain emitting words; state 1 appears in every sequence.
pub struct HiddenChain {
    pub start: Vec<f64>,
    pub trans: Vec<Vec<f64>>,
    pub emit: Vec<Vec<f64>>,
}

fn sample(r: &mut ChaCha8Rng, p: &[f64]) -> usize {
    let u: f64 = r.gen();
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

pub const STATE_LABELS: [TagLabel; 4] = [TagLabel::Other, TagLabel::Type, TagLabel::Attribute, TagLabel::Location];

impl HiddenChain {
    /// Each state owns a block of words and shares a block of ambiguous
    /// words with its neighbour state.
    pub fn generate(r: &mut ChaCha8Rng, vocab_per_state: usize) -> Self {
        let k = 4;
        let v = vocab_per_state * k;
        let start = normalize((0..k).map(|_| r.gen_range(0.5..1.5)).collect());
        let trans = (0..k)
            .map(|i| {
                normalize(
                    (0..k)
                        .map(|j| {
                            if i == j {
                                r.gen_range(1.0..2.0)
                            } else {
                                r.gen_range(0.2..1.0)
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        let emit = (0..k)
            .map(|s| {
                normalize(
                    (0..v)
                        .map(|w| {
                            let owner = w / vocab_per_state;
                            if owner == s {
                                r.gen_range(0.5..1.5)
                            } else if owner == (s + 1) % k {
                                r.gen_range(0.1..0.6)
                            } else {
                                0.02
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        HiddenChain { start, trans, emit }
    }

    pub fn sequence(&self, r: &mut ChaCha8Rng, id: &str, min_len: usize, max_len: usize) -> (Question, Vec<TagLabel>) {
        loop {
            let n = r.gen_range(min_len..=max_len);
            let mut states = vec![sample(r, &self.start)];
            while states.len() < n {
                let prev = *states.last().unwrap();
                states.push(sample(r, &self.trans[prev]));
            }
            if !states.contains(&1) {
                continue;
            }
            let words: Vec<String> = states
                .iter()
                .map(|&s| format!("v{}", sample(r, &self.emit[s])))
                .collect();
            let labels = states.iter().map(|&s| STATE_LABELS[s]).collect();
            return (question(id, &words, &vec![0; n]), labels);
        }
    }
}

// ---------- retrieval oracle ----------

pub fn oracle_terms(text: &str, stop: &BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            if !stop.contains(&cur) {
                out.push(cur.clone());
            }
            cur.clear();
        }
    }
    out
}

/// Filter-then-score linear scan with the same ranking contract as the index.
pub fn linear_scan(
    records: &[EntityRecord],
    stop: &BTreeSet<String>,
    q: &BooleanQuery,
    k: usize,
) -> Vec<(String, f64)> {
    let docs: Vec<BTreeMap<String, usize>> = records
        .iter()
        .map(|r| {
            let mut tf = BTreeMap::new();
            for t in oracle_terms(&format!("{} {}", r.name, r.text), stop) {
                *tf.entry(t).or_insert(0) += 1;
            }
            tf
        })
        .collect();
    let n = records.len() as f64;
    let df = |t: &str| docs.iter().filter(|d| d.contains_key(t)).count();
    let hit = |d: &BTreeMap<String, usize>, g: &Vec<String>| g.iter().any(|t| d.contains_key(t));
    let nonempty = |gs: &[Vec<String>]| gs.iter().filter(|g| !g.is_empty()).cloned().collect::<Vec<_>>();
    let (must, should, must_not) = (nonempty(&q.must), nonempty(&q.should), nonempty(&q.must_not));
    let filters = q.type_filter.is_some() || q.city_filter.is_some();
    let msm = q
        .min_should_match
        .unwrap_or(if must.is_empty() && !filters { 1 } else { 0 });
    let mut terms: Vec<&String> = must.iter().chain(&should).flatten().collect();
    terms.sort();
    terms.dedup();
    let mut out = Vec::new();
    for (r, d) in records.iter().zip(&docs) {
        if q.type_filter.as_ref().is_some_and(|t| *t != r.kb_type) {
            continue;
        }
        if let Some(c) = &q.city_filter {
            if !c.iter().any(|c| c.to_lowercase() == r.city.to_lowercase()) {
                continue;
            }
        }
        if !must.iter().all(|g| hit(d, g)) || must_not.iter().any(|g| hit(d, g)) {
            continue;
        }
        if should.iter().filter(|g| hit(d, g)).count() < msm {
            continue;
        }
        let score: f64 = terms
            .iter()
            .filter_map(|t| {
                d.get(t.as_str())
                    .map(|&tf| (1.0 + tf as f64).ln() * (n / df(t) as f64).ln())
            })
            .sum();
        out.push((r.id.clone(), score));
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    out.truncate(k);
    out
}

pub const WORDS: [&str; 24] = [
    "spa",
    "pool",
    "quiet",
    "view",
    "garden",
    "cheap",
    "luxury",
    "bar",
    "breakfast",
    "parking",
    "wifi",
    "family",
    "beach",
    "river",
    "old",
    "town",
    "modern",
    "cozy",
    "noisy",
    "hostel",
    "sauna",
    "vegan",
    "music",
    "the",
];
pub const TYPES: [&str; 4] = ["lodging", "restaurant", "point_of_interest", "city"];
pub const CITIES: [&str; 5] = ["Vienna", "Salzburg", "Graz", "Linz", "Bregenz"];

pub fn random_corpus(r: &mut ChaCha8Rng, n: usize) -> Vec<EntityRecord> {
    (0..n)
        .map(|i| {
            let len = r.gen_range(0..12);
            let text: Vec<&str> = (0..len).map(|_| WORDS[r.gen_range(0..WORDS.len())]).collect();
            EntityRecord {
                id: format!("e{i:04}"),
                name: format!("Entity {}", WORDS[r.gen_range(0..WORDS.len())]),
                kb_type: TYPES[r.gen_range(0..TYPES.len())].into(),
                city: CITIES[r.gen_range(0..CITIES.len())].into(),
                lat: r.gen_range(-89.0..89.0),
                lon: r.gen_range(-179.0..179.0),
                rating: None,
                text: text.join(" "),
            }
        })
        .collect()
}

pub fn random_group(r: &mut ChaCha8Rng) -> Vec<String> {
    (0..r.gen_range(1..=2))
        .map(|_| WORDS[r.gen_range(0..WORDS.len() - 1)].to_string())
        .collect()
}

pub fn random_boolean_query(r: &mut ChaCha8Rng) -> BooleanQuery {
    loop {
        let q = BooleanQuery {
            must: (0..r.gen_range(0..=2)).map(|_| random_group(r)).collect(),
            should: (0..r.gen_range(0..=3)).map(|_| random_group(r)).collect(),
            must_not: (0..r.gen_range(0..=1)).map(|_| random_group(r)).collect(),
            type_filter: r.gen_bool(0.5).then(|| TYPES[r.gen_range(0..TYPES.len())].to_string()),
            city_filter: r
                .gen_bool(0.3)
                .then(|| vec![CITIES[r.gen_range(0..CITIES.len())].to_lowercase()]),
            min_should_match: r.gen_bool(0.3).then(|| r.gen_range(0..=2)),
        };
        if !q.must.is_empty() || !q.should.is_empty() {
            return q;
        }
    }
}

// ---------- geodesy oracle ----------

/// Great-circle distance from the chord between unit vectors.
pub fn chord_distance_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let v = |lat: f64, lon: f64| {
        let (la, lo) = (lat.to_radians(), lon.to_radians());
        [la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin()]
    };
    let (a, b) = (v(lat1, lon1), v(lat2, lon2));
    let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    2.0 * 6371.0 * (chord / 2.0).min(1.0).asin()
}

// ---------- boolean evaluation of queries ----------

/// Truth of a query when each clause phrase is an atomic predicate.
/// PREF is a soft preference and does not change truth.
pub fn eval_query(q: &RqlQuery, atom: &dyn Fn(&str) -> bool) -> bool {
    fn go(q: &RqlQuery, c: &Connective, atom: &dyn Fn(&str) -> bool) -> bool {
        match c {
            Connective::Leaf(i) => {
                let cl = &q.clauses[*i];
                let base = if cl.has(Operator::InSet) {
                    cl.terminal.phrases.iter().any(|p| atom(p))
                } else {
                    atom(cl.phrase())
                };
                base != cl.has(Operator::Not)
            }
            Connective::And(l, r) => go(q, l, atom) && go(q, r, atom),
            Connective::Or(l, r) => go(q, l, atom) || go(q, r, atom),
        }
    }
    go(q, &q.tree, atom)
}
